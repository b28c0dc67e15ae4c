"""Vertex-operator currents: constants, mode actions, worked anchors."""

from fractions import Fraction

import pytest

from uqsl import LinForm, affine_symbols
from uqsl.affine import AffineContext
from uqsl.currents import (
    CURRENT_PARITY,
    VertexEngine,
    default_e_values,
    f_constants,
    h_coeffs,
    make_currents,
)
from uqsl.oscillators import VACUUM, FockState, OscillatorAlgebra


@pytest.fixture(scope="module")
def ctx():
    return AffineContext()


def one_at(ctx, state=VACUUM):
    return {state: ctx.table.one()}


class TestFConstants:
    def test_defaults(self):
        T = affine_symbols()
        fs = f_constants(T, default_e_values(T))
        assert fs["f11"] == T.monomial({"e11": -1})
        assert fs["f12"] == T.monomial({"e12": -1})
        assert fs["f13"] == T.monomial({"G": 2, "q": 2, "e21": 1, "e11": -1, "e22": -1})
        assert fs["f21"] == T.monomial({"q": 2, "e21": -1})
        assert fs["f22"] == T.monomial({"q": 2, "e12": 1, "e11": -1, "e21": -1})
        assert fs["f23"] == T.monomial({"e22": -1})
        assert fs["f24"] == T.monomial({"e12": 1, "e11": -1, "e22": -1})

    def test_unit_e_values(self):
        # with every e = 1 the seven constants collapse to q-powers
        T = affine_symbols()
        ones = {name: T.one() for name in ("e11", "e12", "e21", "e22")}
        fs = f_constants(T, ones)
        q = T.qpow(LinForm(1))
        want = {
            "f11": T.one(),
            "f12": T.one(),
            "f13": T.qpow(LinForm(1, {"k": Fraction(1)})),
            "f21": q,
            "f22": q,
            "f23": T.one(),
            "f24": T.one(),
        }
        assert fs == want

    def test_override_applied(self):
        T = affine_symbols()
        fs = f_constants(T, default_e_values(T), {"f13": T.one()})
        assert fs["f13"] == T.one()
        assert fs["f11"] == T.monomial({"e11": -1})

    def test_override_unknown(self):
        T = affine_symbols()
        with pytest.raises(ValueError):
            f_constants(T, default_e_values(T), {"f99": T.one()})


class TestCurrentTables:
    def test_term_counts(self, ctx):
        counts = {name: len(terms) for name, terms in ctx.currents.items()}
        assert counts == {
            "E1": 2, "E2": 2, "F1": 3, "F2": 4,
            "psi1+": 1, "psi1-": 1, "psi2+": 1, "psi2-": 1,
        }

    def test_parities(self):
        assert CURRENT_PARITY["E1"] == 0 and CURRENT_PARITY["F1"] == 0
        assert CURRENT_PARITY["E2"] == 1 and CURRENT_PARITY["F2"] == 1
        assert all(CURRENT_PARITY[f"psi{i}{s}"] == 0 for i in (1, 2) for s in "+-")

    def test_rejects_full_cartan(self):
        T = affine_symbols()
        eng = VertexEngine(OscillatorAlgebra(T))
        with pytest.raises(ValueError):
            eng.make_vterm(T.one(), 0, [("a1", "full", LinForm(0), 1)])

    def test_rejects_unknown_kind(self):
        T = affine_symbols()
        eng = VertexEngine(OscillatorAlgebra(T))
        with pytest.raises(ValueError):
            eng.make_vterm(T.one(), 0, [("b12", "half", LinForm(0), 1)])


class TestHCoeffs:
    def test_i1_values(self):
        T = affine_symbols()
        c = h_coeffs(T, 1, 1)
        inner = T.monomial({"q": -2, "G": -1})
        assert c["a1"] == T.monomial({"q": -1})
        assert c["b12"] == inner * T.qint(2)
        assert c["b13"] == T.monomial({"q": -4, "G": -1})
        assert c["b23"] == -inner

    def test_i2_families(self):
        T = affine_symbols()
        c = h_coeffs(T, 2, 1)
        assert set(c) == {"a2", "b12", "b13"}
        assert c["b12"] == c["b13"]

    def test_mode_sign_invisible(self):
        # coefficients depend on |n| only; the mode index carries the sign
        T = affine_symbols()
        assert h_coeffs(T, 1, 2) == h_coeffs(T, 1, -2)

    def test_zero_mode_rejected(self):
        with pytest.raises(ValueError):
            h_coeffs(affine_symbols(), 1, 0)

    def test_unknown_index(self):
        with pytest.raises(ValueError):
            h_coeffs(affine_symbols(), 3, 1)


class TestVacuumAnchors:
    def test_e2_minus_one(self, ctx):
        T = ctx.table
        out = ctx.mode_vec("E2", -1, one_at(ctx))
        assert out == {
            FockState((0, 0, 1, 0)): T.monomial({"e21": 1}),
            FockState((1, 1, 0, 1)): T.monomial({"e22": 1}),
        }

    def test_f1_zero(self, ctx):
        T = ctx.table
        out = ctx.mode_vec("F1", 0, one_at(ctx))
        want = (
            T.monomial({"W1": 1, "e11": -1}) - T.monomial({"W1": -1, "e12": -1})
        ) * T.qdiff_inv()
        assert out == {FockState((1, 0, 0, 1)): want}

    def test_e1_zero(self, ctx):
        T = ctx.table
        out = ctx.mode_vec("E1", 0, one_at(ctx))
        want = (T.monomial({"e12": 1}) - T.monomial({"e11": 1})) * T.qdiff_inv()
        assert out == {FockState((-1, 0, 0, -1)): want}

    def test_psi_zero_modes(self, ctx):
        T = ctx.table
        assert ctx.mode_vec("psi2+", 0, one_at(ctx)) == {VACUUM: T.monomial({"W2": 1})}
        assert ctx.mode_vec("psi2-", 0, one_at(ctx)) == {VACUUM: T.monomial({"W2": -1})}
        assert ctx.mode_vec("psi1+", 0, one_at(ctx)) == {VACUUM: T.monomial({"W1": 1})}

    def test_ef_bracket(self, ctx):
        T = ctx.table
        out = ctx.graded_pair("E1", 0, "F1", 0, VACUUM)
        want = (T.monomial({"W1": 1}) - T.monomial({"W1": -1})) * T.qdiff_inv()
        assert out == {VACUUM: want}


class TestModeVanishing:
    def test_e2_annihilates(self, ctx):
        for n in range(0, 3):
            assert ctx.mode_vec("E2", n, one_at(ctx)) == {}

    def test_e1_annihilates(self, ctx):
        for n in range(1, 4):
            assert ctx.mode_vec("E1", n, one_at(ctx)) == {}

    def test_psi_plus_annihilates(self, ctx):
        for n in (-1, -2):
            assert ctx.mode_vec("psi2+", n, one_at(ctx)) == {}
            assert ctx.mode_vec("psi1+", n, one_at(ctx)) == {}


class TestFusedRoute:
    # one joint extraction must agree with mode-by-mode application
    samples = [
        (("E1", "F1"), (0, 0)),
        (("E2", "F1"), (-1, 0)),
        (("F2", "E2"), (1, -2)),
        (("E1", "E1", "E2"), (-1, 0, 1)),
    ]

    @pytest.mark.parametrize("names,modes", samples)
    def test_on_vacuum(self, ctx, names, modes):
        assert ctx.product_vec_fused(names, modes, VACUUM) == ctx.product_vec(
            names, modes, VACUUM
        )

    @pytest.mark.parametrize("names,modes", samples)
    def test_on_excited_state(self, ctx, names, modes):
        state = FockState((0, 1, 0, 0)).with_creation("b12", 1)
        assert ctx.product_vec_fused(names, modes, state) == ctx.product_vec(
            names, modes, state
        )


class TestZeroModeOrdering:
    def test_mixed_bracket_cancels(self, ctx):
        # the three-constant F1 term must cancel against E2 exactly
        assert ctx.graded_pair("E2", 0, "F1", -1, VACUUM) == {}

    def test_sabotage_leaks(self):
        sab = AffineContext(f_overrides={"f13": affine_symbols().one()})
        out = sab.graded_pair("E2", 0, "F1", -1, VACUUM)
        assert list(out) == [FockState((1, 0, 1, 1))]


class TestCartanAnchor:
    def test_h1_on_e1(self, ctx):
        # [H^1_1, E1_-1]|0> = [2] gamma^(-1/2) E1_0 |0>
        T = ctx.table
        one = one_at(ctx)
        lhs = ctx.h_vec(1, 1, ctx.mode_vec("E1", -1, one))
        assert ctx.h_vec(1, 1, one) == {}
        coeff = T.qint(2) * ctx.gamma_pow(Fraction(-1, 2))
        rhs = {s: c * coeff for s, c in ctx.mode_vec("E1", 0, one).items()}
        assert lhs == rhs
