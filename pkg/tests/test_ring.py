"""Ring arithmetic: q-integers, brackets, packing, canonical forms."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uqsl import (
    LinForm,
    RingError,
    affine_symbols,
    bracket_symbols,
    finite_symbols,
    verify_bracket_identity,
)


@pytest.fixture
def T():
    return finite_symbols(2)


def num(table):
    # s = 3 means q = 9
    vals = {"q": Fraction(3)}
    primes = [5, 7, 11, 13, 17, 19, 23]
    for i, sym in enumerate(table.symbols[1:]):
        vals[sym] = Fraction(primes[i % len(primes)])
    return vals


class TestQInt:
    def test_zero_one(self, T):
        assert T.qint(0).is_zero()
        assert T.qint(1) == 1

    def test_two_value(self, T):
        # [2] = q + q^-1 = 9 + 1/9 = 82/9 at s = 3
        v = T.qint(2).subst_numeric(num(T))
        assert v == Fraction(82, 9)

    def test_negation(self, T):
        for n in range(-5, 6):
            assert T.qint(-n) == -T.qint(n)

    def test_matches_bracket(self, T):
        for n in range(-6, 7):
            assert T.qint(n) == T.qbracket(LinForm(n))


class TestQPow:
    def test_formal_weight(self, T):
        el = T.qpow(LinForm.sym("l1"))
        assert el == T.monomial({"L1": 1})

    def test_level_half_integer(self):
        A = affine_symbols()
        # q^(k/2 + 2) = Gamma * q^2
        el = A.qpow(LinForm(2, {"k": Fraction(1, 2)}))
        assert el == A.monomial({"G": 1, "q": 4})

    def test_numeric_level(self):
        A = affine_symbols(k=3)
        el = A.qpow(LinForm(0, {"k": 1}))
        assert el == A.monomial({"q": 6})

    def test_rejects_fractional(self, T):
        with pytest.raises(RingError):
            T.qpow(LinForm(0, {"l1": Fraction(1, 2)}))

    def test_rejects_theta(self, T):
        with pytest.raises(RingError):
            T.qpow(LinForm.theta((1, 2)))

    def test_inverse(self, T):
        el = T.qpow(LinForm.sym("l1"))
        assert el * el.inverse() == 1


class TestArith:
    def test_display_sum(self, T):
        el = T.monomial({"q": 4}) + T.monomial({"q": -4})
        assert str(el) == "q^2 + q^-2"

    def test_display_weight(self, T):
        el = T.monomial({"L1": 1, "q": -4})
        assert str(el) == "L1*q^-2"

    def test_display_half(self, T):
        assert str(T.monomial({"q": 3})) == "q^(3/2)"

    def test_display_zero(self, T):
        assert str(T.zero()) == "0"

    def test_bracket_times_qdiff(self, T):
        # (q - q^-1)[2] = q^2 - q^-2
        el = T.qdiff() * T.qint(2)
        want = T.monomial({"q": 4}) - T.monomial({"q": -4})
        assert el == want

    def test_denominator_alignment(self, T):
        el = T.qbracket(LinForm.sym("l1")) + T.qint(2)
        v = el.subst_numeric(num(T))
        s, L = Fraction(3), Fraction(5)
        q = s * s
        assert v == (L - 1 / L) / (q - 1 / q) + q + 1 / q

    def test_canonical_divides(self, T):
        frac = T.qbracket(LinForm.sym("l1")) * T.qdiff()
        c = frac.canonical()
        assert c.dpow == 0
        assert c == frac

    def test_canonical_idempotent(self, T):
        el = T.qbracket(LinForm.sym("l1")) * T.qbracket(LinForm.sym("l2"))
        c = el.canonical()
        assert c.canonical().dpow == c.dpow
        assert c == el

    def test_pow(self, T):
        el = T.qint(2)
        assert el ** 3 == el * el * el
        mono = T.monomial({"L1": 2})
        assert mono ** -2 == T.monomial({"L1": -4})

    def test_table_mismatch(self, T):
        with pytest.raises(RingError):
            T.one() + finite_symbols(3).one()

    def test_subst_requires_all(self, T):
        with pytest.raises(RingError):
            T.one().subst_numeric({"q": Fraction(3)})

    def test_subst_rejects_denominator_root(self, T):
        el = T.qbracket(LinForm.sym("l1"))
        with pytest.raises(RingError):
            el.subst_numeric({"q": Fraction(1), "L1": Fraction(5), "L2": Fraction(7)})


class TestBracketIdentity:
    @pytest.mark.parametrize("n", [1, 2, 4])
    def test_holds(self, n):
        assert verify_bracket_identity(n)

    def test_perturbed_fails(self):
        # same combination with one exponent sign flipped must not collapse
        table = bracket_symbols(1)
        a, b = LinForm.sym("a"), LinForm.sym("b1")
        lhs = table.qbracket(a) * table.qpow(b) + table.qbracket(b) * table.qpow(a)
        assert lhs != table.qbracket(a + b)


exps = st.integers(min_value=-8, max_value=8)


@st.composite
def elements(draw):
    T = finite_symbols(2)
    el = T.zero()
    for _ in range(draw(st.integers(0, 4))):
        c = draw(st.integers(-5, 5))
        e = {"q": draw(exps), "L1": draw(exps), "L2": draw(exps)}
        el = el + T.monomial(e, c)
    if draw(st.booleans()):
        el = el * T.qbracket(LinForm.sym("l1"))
    return el


class TestRingAxioms:
    @settings(max_examples=60, deadline=None)
    @given(elements(), elements(), elements())
    def test_distributive(self, a, b, c):
        assert a * (b + c) == a * b + a * c

    @settings(max_examples=60, deadline=None)
    @given(elements(), elements())
    def test_commutative(self, a, b):
        assert a * b == b * a

    @settings(max_examples=60, deadline=None)
    @given(elements())
    def test_sub_self(self, a):
        assert (a - a).is_zero()

    @settings(max_examples=60, deadline=None)
    @given(elements())
    def test_canonical_preserves(self, a):
        assert a.canonical() == a

    @settings(max_examples=60, deadline=None)
    @given(st.integers(-9, 9), st.integers(-9, 9))
    def test_qint_addition(self, a, b):
        T = finite_symbols(1)
        lhs = T.qbracket(LinForm(a + b))
        rhs = T.qint(a) * T.qpow(LinForm(b)) + T.qint(b) * T.qpow(LinForm(-a))
        assert lhs == rhs


class TestPacking:
    @settings(max_examples=80, deadline=None)
    @given(exps, exps, exps)
    def test_roundtrip(self, a, b, c):
        T = finite_symbols(2)
        exp = {}
        if a:
            exp["q"] = a
        if b:
            exp["L1"] = b
        if c:
            exp["L2"] = c
        assert T.unpack(T.pack(exp)) == exp

    def test_overflow_guard(self):
        T = finite_symbols(1)
        with pytest.raises(RingError):
            T.pack({"q": 1 << 23})
