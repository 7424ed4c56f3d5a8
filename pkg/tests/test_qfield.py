import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from icopack.qfield import GN, ONE, TAU, TAU_CONJ, ZERO, GoldenNumber, sqrt5_enclosure


def gn(rat="0", gold="0"):
    return GN(Fraction(rat), Fraction(gold))


rationals = st.fractions(
    min_value=-(10**6), max_value=10**6, max_denominator=10**3
)
golden_numbers = st.builds(GN, rationals, rationals)


class TestArithmetic:
    def test_square_of_one_plus_tau(self):
        assert (ONE + TAU) * (ONE + TAU) == GN(2, 3)

    def test_tau_times_conjugate_is_minus_one(self):
        assert TAU * (ONE - TAU) == GN(-1)

    def test_inverse_of_four_plus_two_tau(self):
        x = GN(4, 2)
        inv = ONE / x
        assert inv == GN(Fraction(3, 10), Fraction(-1, 10))
        # cross-check by expansion
        assert x * inv == ONE

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            ONE / ZERO

    def test_defining_relation(self):
        assert TAU * TAU == TAU + 1

    def test_mixed_scalar_ops(self):
        assert 2 * TAU - 1 == GN(-1, 2)
        assert TAU + Fraction(1, 2) == GN(Fraction(1, 2), 1)
        assert 1 / TAU == TAU - 1

    def test_canonical_form_reduced(self):
        x = GN(Fraction(2, 4), Fraction(6, 4))
        assert (x.a, x.b, x.q) == (1, 3, 2)
        assert x.q > 0


class TestConjugation:
    def test_tau_maps_to_one_minus_tau(self):
        assert TAU.conjugate() == TAU_CONJ == ONE - TAU

    def test_fixes_rationals_and_is_linear(self):
        assert GN(2, 3).conjugate() == GN(5, -3)

    def test_involution(self):
        y = gn("7/3", "-2")
        assert y.conjugate().conjugate() == y


class TestSign:
    def test_zero(self):
        assert ZERO.sign() == 0

    def test_one_minus_tau_negative(self):
        assert (ONE - TAU).sign() == -1

    def test_five_minus_three_tau_positive(self):
        # s = 13, t = -3: 169 > 45, sign follows s
        assert GN(5, -3).sign() == 1
        lo, hi = GN(5, -3).float_enclosure(53)
        assert 0.1458 < lo <= hi < 0.1460

    @given(golden_numbers, golden_numbers)
    def test_trichotomy(self, x, y):
        assert (x < y) + (x == y) + (x > y) == 1


class TestEnclosure:
    def test_tau_interval(self):
        lo, hi = TAU.float_enclosure(53)
        assert lo <= 1.6180339887498949 <= hi
        assert hi - lo <= 2 * 2**-52

    def test_zero_interval(self):
        assert ZERO.float_enclosure(53) == (0.0, 0.0)

    def test_one_minus_tau(self):
        lo, hi = (ONE - TAU).float_enclosure(53)
        assert lo <= -0.6180339887498949 <= hi
        assert hi < 0

    def test_precision_floor(self):
        with pytest.raises(ValueError):
            TAU.float_enclosure(23)

    def test_sqrt5_interval_exact_bounds(self):
        lo, hi = sqrt5_enclosure(64)
        assert lo * lo < 5 < hi * hi
        assert hi - lo == Fraction(1, 2**64)

    @given(golden_numbers, st.integers(min_value=24, max_value=80))
    def test_contains_value_and_tight(self, x, bits):
        lo, hi = x.float_enclosure(bits)
        # enclosure really contains the value: check against a finer one
        lo2, hi2 = x.float_enclosure(bits + 40)
        assert lo <= lo2 and hi2 <= hi
        scale = max(1.0, abs(lo), abs(hi))
        ulp = math.ulp(scale)
        assert hi - lo <= 2 ** (1 - min(bits, 52)) * scale + 2 * ulp

    @given(golden_numbers)
    def test_sign_agrees_when_enclosure_excludes_zero(self, x):
        lo, hi = x.float_enclosure(53)
        if lo > 0:
            assert x.sign() == 1
        elif hi < 0:
            assert x.sign() == -1


class TestFieldAxioms:
    @given(golden_numbers, golden_numbers, golden_numbers)
    def test_associativity_and_distributivity(self, x, y, z):
        assert (x + y) + z == x + (y + z)
        assert x * (y + z) == x * y + x * z

    @given(golden_numbers)
    def test_multiplicative_inverse(self, x):
        if x != ZERO:
            assert x * x.inverse() == ONE

    @given(golden_numbers, golden_numbers)
    def test_automorphism(self, x, y):
        assert (x * y).conjugate() == x.conjugate() * y.conjugate()
        assert (x + y).conjugate() == x.conjugate() + y.conjugate()

    @given(golden_numbers)
    def test_trace_and_norm_rational(self, x):
        assert (x + x.conjugate()).gold == 0
        assert (x * x.conjugate()).gold == 0


class TestText:
    @pytest.mark.parametrize(
        "text,value",
        [
            ("1", ONE),
            ("-2/3*t", GN(0, Fraction(-2, 3))),
            ("1/2+1/2*t", GN(Fraction(1, 2), Fraction(1, 2))),
            ("t", TAU),
            ("-t", -TAU),
            (" 1/2 + 1/2*t ", GN(Fraction(1, 2), Fraction(1, 2))),
            ("3-2*t", GN(3, -2)),
            ("0", ZERO),
        ],
    )
    def test_parse(self, text, value):
        assert GN.from_text(text) == value

    @pytest.mark.parametrize("bad", ["", "x", "1+", "t*t", "1.5", "2t", "1++t", "τ"])
    def test_rejects_other_symbols(self, bad):
        with pytest.raises(ValueError):
            GN.from_text(bad)

    @given(golden_numbers)
    def test_roundtrip(self, x):
        assert GN.from_text(x.to_text()) == x


class TestHashing:
    def test_structural_equality_as_key(self):
        seen = {GN(Fraction(1, 2), Fraction(3, 2)): "a"}
        assert seen[GN(Fraction(2, 4), Fraction(6, 4))] == "a"

    def test_rational_hash_matches_fraction(self):
        assert hash(GN(Fraction(3, 7))) == hash(Fraction(3, 7))

    def test_immutable(self):
        with pytest.raises(AttributeError):
            TAU.a = 5
