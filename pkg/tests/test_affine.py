"""Loop-algebra relation suites: counts, spot identities, negative controls."""

from fractions import Fraction

import pytest

from uqsl import LinForm, affine_symbols
from uqsl.affine import (
    AffineContext,
    _partitions,
    affine_config,
    check_eq7,
    check_eq10,
    check_eq12,
    check_eq14,
    run_affine,
)
from uqsl.bulk import BulkError
from uqsl.oscillators import VACUUM, enumerate_basis


@pytest.fixture(scope="module")
def smoke():
    """E_cut=1, window=1 covers every checker with all symbols formal."""
    return run_affine(E_cut=1, window=1, psi_nmax=2)


@pytest.fixture(scope="module")
def ctx():
    return AffineContext()


class TestSmokeSuite:
    def test_counts_by_relation(self, smoke):
        counts = {}
        for r in smoke:
            eq = r.id.split(".")[1]
            counts[eq] = counts.get(eq, 0) + 1
        assert counts == {
            "eq6": 1, "eq7": 12, "eq8": 56, "eq9": 48, "eq10": 36,
            "eq11": 54, "eq12": 12, "eq13": 36, "eq14": 1, "eq15": 20,
        }

    def test_all_pass(self, smoke):
        bad = [r.id for r in smoke if r.status == "fail"]
        assert bad == []

    def test_ids_unique(self, smoke):
        ids = [r.id for r in smoke]
        assert len(set(ids)) == len(ids)

    def test_only_eq14_not_applicable(self, smoke):
        na = [r.id for r in smoke if r.status == "not-applicable"]
        assert na == ["drinfeld.eq14"]

    def test_numeric_blocks(self, smoke):
        for r in smoke:
            if r.status != "pass":
                continue
            assert r.numeric["status"] == "pass"
            assert r.numeric["assignments"] == 3
            assert r.numeric["pairs"] <= 64

    def test_formal_level_in_ids(self, smoke):
        tagged = [r for r in smoke if ".k=" in r.id]
        assert tagged and all(r.id.endswith("k=formal") for r in tagged)

    def test_checked_counts(self, smoke):
        # seven states at energy <= 1, one comparison case per state
        r = next(r for r in smoke if r.id.startswith("drinfeld.eq10."))
        assert r.checked == 7


class TestDeterminism:
    def test_repeat_run_identical(self):
        a = run_affine(E_cut=0, window=1, psi_nmax=1)
        b = run_affine(E_cut=0, window=1, psi_nmax=1)
        assert a == b


class TestNumericLevel:
    def test_k2_suite(self):
        res = run_affine(E_cut=0, window=1, k=2, psi_nmax=1)
        assert all(r.status != "fail" for r in res)
        assert any(r.id.endswith("k=2") for r in res)

    def test_gamma_at_k2(self):
        ctx = AffineContext(k=2)
        assert ctx.gamma_pow(1) == ctx.table.monomial({"q": 4})


class TestScalars:
    def test_gamma_pow(self, ctx):
        T = ctx.table
        assert ctx.gamma_pow(Fraction(1, 2)) == T.monomial({"G": 1})
        assert ctx.gamma_pow(1) == T.monomial({"G": 2})
        assert ctx.gamma_pow(-1) * ctx.gamma_pow(1) == T.one()

    @pytest.mark.parametrize("i,j", [(1, 1), (1, 2), (2, 1), (2, 2)])
    def test_cartan_mode_scalars(self, ctx, i, j):
        # the oscillator route against the closed form, beyond the window
        for n in (1, 2, 5):
            assert ctx.h_scalar(i, j, n) == ctx.eq8_rhs_scalar(i, j, n)

    def test_degenerate_pair_cancels(self, ctx):
        assert ctx.h_scalar(2, 2, 3).is_zero()
        assert ctx.eq8_rhs_scalar(2, 2, 3).is_zero()


class TestPartitions:
    def test_empty(self):
        assert _partitions(0) == [()]

    def test_four(self):
        assert sorted(_partitions(4)) == sorted([
            (4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)])

    def test_shape(self):
        for n in range(1, 7):
            for parts in _partitions(n):
                assert sum(parts) == n
                assert list(parts) == sorted(parts, reverse=True)


class TestEq14:
    def test_not_applicable(self, ctx):
        (res,) = check_eq14(ctx)
        assert res.status == "not-applicable"
        assert "reason" in res.witness


class TestMomentumSector:
    """Relations on states with shifted zero modes; the cocycle signs and
    momentum eigenvalues enter nontrivially only here."""

    def test_conjugation(self, ctx):
        basis = enumerate_basis(1, radius=1)
        res = check_eq7(ctx, basis, 1)
        assert [r.status for r in res] == ["pass"] * 12

    def test_odd_anticommutator(self, ctx):
        basis = enumerate_basis(1, radius=1)
        res = check_eq12(ctx, basis, 1)
        assert [r.status for r in res] == ["pass"] * 12

    def test_ef_bracket(self, ctx):
        basis = enumerate_basis(1, radius=1)
        res = check_eq10(ctx, basis, 1)
        assert [r.status for r in res] == ["pass"] * 36


class TestPackedEngine:
    """The int64-row fast path must reproduce the exact path bit for bit,
    or decline; never a third behaviour."""

    def serre_pieces(self, ctx, pref, n1, n2, m):
        T = ctx.table
        mq = -T.qpow(LinForm(1))
        mqinv = -T.qpow(LinForm(-1))
        aab = (f"{pref}1", f"{pref}1", f"{pref}2")
        aba = (f"{pref}1", f"{pref}2", f"{pref}1")
        baa = (f"{pref}2", f"{pref}1", f"{pref}1")
        pieces = []
        for (na, nb) in ((n1, n2), (n2, n1)):
            pieces += [
                (aab, (na, nb, m), None),
                (aba, (na, m, nb), mqinv),
                (aba, (nb, m, na), mq),
                (baa, (m, nb, na), None),
            ]
        return pieces

    def test_serre_residual_matches(self, ctx):
        pieces = self.serre_pieces(ctx, "F", -1, 0, 1)
        jobs = ctx._jobs(pieces)
        for state in enumerate_basis(2)[::7]:
            fast = ctx.bulk.combo_residual(jobs, state)
            slow = ctx.engine.extract_sum(jobs, state)
            assert fast == slow == {}

    def test_sabotage_residual_matches(self):
        # a corrupted constant must leak identically through both paths
        sab = AffineContext(f_overrides={"f13": affine_symbols().one()})
        pieces = self.serre_pieces(sab, "F", -1, -1, 0)
        jobs = sab._jobs(pieces)
        fast = sab.bulk.combo_residual(jobs, VACUUM)
        slow = sab.engine.extract_sum(jobs, VACUUM)
        assert fast == slow
        assert fast and all(not c.is_zero() for c in fast.values())

    def test_pair_residual_matches(self, ctx):
        pieces = ctx._pair_pieces("E2", 1, "E2", -1)
        jobs = ctx._jobs(pieces)
        for state in enumerate_basis(2)[:10]:
            assert ctx.bulk.combo_residual(jobs, state) == ctx.engine.extract_sum(
                jobs, state)

    def test_nonzero_product_decodes(self, ctx):
        # a single product, not a cancelling combination: decode path
        jobs = ctx._jobs([(("E1", "F1"), (0, 0), None)])
        fast = ctx.bulk.combo_residual(jobs, VACUUM)
        slow = ctx.engine.extract_sum(jobs, VACUUM)
        assert fast == slow and fast

    def test_guard_declines_wide_exponents(self, ctx):
        huge = ctx.table.qpow(LinForm(3000))
        pieces = ctx._pair_pieces("E1", 0, "F1", 0, huge)
        jobs = ctx._jobs(pieces)
        with pytest.raises(BulkError):
            ctx.bulk.combo_residual(jobs, VACUUM)
        # the public entry falls back to the exact path
        out = ctx.combo_zero(pieces, VACUUM)
        assert out == ctx.engine.extract_sum(jobs, VACUUM)


class TestNegativeControls:
    @pytest.mark.parametrize(
        "name", ["f11", "f12", "f13", "f21", "f22", "f23", "f24"])
    def test_each_constant_detected(self, name):
        T = affine_symbols()
        res = run_affine(E_cut=0, window=1, psi_nmax=1,
                         f_overrides={name: T.one()})
        bad = [r for r in res if r.status == "fail"]
        assert bad, f"override {name}=1 went undetected"
        assert all(r.witness is not None for r in bad)

    def test_f13_locus(self):
        # the three-constant term sits in F1 and leaks into the mixed
        # bracket with E2, not the diagonal (1,1) one
        T = affine_symbols()
        res = run_affine(E_cut=0, window=1, psi_nmax=1,
                         f_overrides={"f13": T.one()})
        fails = {r.id for r in res if r.status == "fail"}
        assert "drinfeld.eq10.i=2.j=1.n=0.m=-1.k=formal" in fails
        assert not any(".eq10.i=1.j=1" in f for f in fails)


class TestConfig:
    def test_affine_config(self):
        cfg = affine_config(2, 2, None, 0, "l1", 4, {"f13": "1"})
        assert cfg["k"] == "formal"
        assert cfg["overrides"] == {"f13": "1"}
        assert cfg["M"] == 2 and cfg["N"] == 1
