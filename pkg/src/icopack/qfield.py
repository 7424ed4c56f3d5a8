"""Exact arithmetic in the quadratic field Q[tau], tau = (1 + sqrt 5)/2.

Every quantity downstream of the cluster geometry lives in this field:
matrix entries, lattice-point images, feasibility bounds.  All branches in
the package go through :meth:`GoldenNumber.sign`; floats appear only in
:meth:`GoldenNumber.float_enclosure` output, never in decisions.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import total_ordering
from typing import Union

Rational = Fraction

_Coercible = Union["GoldenNumber", int, Fraction]


def _sqrt5_scaled(precision_bits: int) -> int:
    # floor(sqrt(5) * 2^p): s <= sqrt(5)*2^p < s+1.
    return math.isqrt(5 << (2 * precision_bits))


def sqrt5_enclosure(precision_bits: int) -> tuple[Fraction, Fraction]:
    """Rational interval [lo, hi] containing sqrt(5), width 2^-precision_bits."""
    s = _sqrt5_scaled(precision_bits)
    scale = 1 << precision_bits
    return Fraction(s, scale), Fraction(s + 1, scale)


def _float_below(x: Fraction) -> float:
    f = float(x)
    if math.isinf(f):
        return math.nextafter(f, -math.inf) if f > 0 else f
    if Fraction(f) > x:
        return math.nextafter(f, -math.inf)
    return f


def _float_above(x: Fraction) -> float:
    f = float(x)
    if math.isinf(f):
        return math.nextafter(f, math.inf) if f < 0 else f
    if Fraction(f) < x:
        return math.nextafter(f, math.inf)
    return f


_TERM_RE = re.compile(
    r"""^
    (?:(?P<rat>[+-]?\d+(?:/\d+)?))?
    (?:(?P<gold>(?(rat)[+-]|[+-]?)(?:\d+(?:/\d+)?\*)?t))?
    $""",
    re.VERBOSE,
)


@total_ordering
class GoldenNumber:
    """An element (a + b*tau)/q of Q[tau], reduced so gcd(a, b, q) = 1, q > 0.

    tau satisfies tau^2 = tau + 1.  The field automorphism ``conjugate``
    maps tau to 1 - tau (equivalently sqrt(5) to -sqrt(5)).
    """

    __slots__ = ("a", "b", "q")

    a: int
    b: int
    q: int

    def __init__(self, rat: int | Fraction = 0, gold: int | Fraction = 0) -> None:
        rat = Fraction(rat)
        gold = Fraction(gold)
        q = rat.denominator * gold.denominator // math.gcd(
            rat.denominator, gold.denominator
        )
        self._set(rat.numerator * (q // rat.denominator),
                  gold.numerator * (q // gold.denominator), q)

    def _set(self, a: int, b: int, q: int) -> None:
        if q < 0:
            a, b, q = -a, -b, -q
        g = math.gcd(a, b, q)
        if g > 1:
            a, b, q = a // g, b // g, q // g
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "q", q)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("GoldenNumber is immutable")

    @classmethod
    def _raw(cls, a: int, b: int, q: int) -> GoldenNumber:
        self = object.__new__(cls)
        self._set(a, b, q)
        return self

    # -- field structure ---------------------------------------------------

    @property
    def rat(self) -> Fraction:
        return Fraction(self.a, self.q)

    @property
    def gold(self) -> Fraction:
        return Fraction(self.b, self.q)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    @staticmethod
    def _coerce(x: _Coercible) -> GoldenNumber | None:
        if isinstance(x, GoldenNumber):
            return x
        if isinstance(x, int):
            return GoldenNumber._raw(x, 0, 1)
        if isinstance(x, Fraction):
            return GoldenNumber._raw(x.numerator, 0, x.denominator)
        return None

    def __add__(self, other: _Coercible) -> GoldenNumber:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GoldenNumber._raw(
            self.a * o.q + o.a * self.q, self.b * o.q + o.b * self.q, self.q * o.q
        )

    __radd__ = __add__

    def __neg__(self) -> GoldenNumber:
        return GoldenNumber._raw(-self.a, -self.b, self.q)

    def __sub__(self, other: _Coercible) -> GoldenNumber:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GoldenNumber._raw(
            self.a * o.q - o.a * self.q, self.b * o.q - o.b * self.q, self.q * o.q
        )

    def __rsub__(self, other: _Coercible) -> GoldenNumber:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other: _Coercible) -> GoldenNumber:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        # (a1 + b1 t)(a2 + b2 t) with t^2 = t + 1
        bb = self.b * o.b
        return GoldenNumber._raw(
            self.a * o.a + bb, self.a * o.b + self.b * o.a + bb, self.q * o.q
        )

    __rmul__ = __mul__

    def inverse(self) -> GoldenNumber:
        # 1/((a+bt)/q) = q (a+b-bt) / (a^2+ab-b^2); the norm a^2+ab-b^2 is a
        # nonzero integer whenever (a, b) != (0, 0).
        n = self.a * self.a + self.a * self.b - self.b * self.b
        if n == 0:
            raise ZeroDivisionError("division by zero in Q[tau]")
        return GoldenNumber._raw(self.q * (self.a + self.b), -self.q * self.b, n)

    def __truediv__(self, other: _Coercible) -> GoldenNumber:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other: _Coercible) -> GoldenNumber:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int) -> GoldenNumber:
        if n < 0:
            return self.inverse() ** (-n)
        out = _ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self) -> GoldenNumber:
        """The Galois automorphism: tau -> 1 - tau (sqrt 5 -> -sqrt 5)."""
        return GoldenNumber._raw(self.a + self.b, -self.b, self.q)

    # -- order -------------------------------------------------------------

    def sign(self) -> int:
        """Exact sign of the real value (a + b*tau)/q.

        Writing a + b*tau = (s + t*sqrt5)/2 with s = 2a + b, t = b: same-sign
        s, t settle it; mixed signs compare s^2 against 5 t^2 (never equal
        for t != 0 since sqrt 5 is irrational).
        """
        s = 2 * self.a + self.b
        t = self.b
        if s >= 0 and t >= 0:
            return 1 if (s or t) else 0
        if s <= 0 and t <= 0:
            return -1
        big_s = s * s > 5 * t * t
        if s > 0:  # t < 0
            return 1 if big_s else -1
        return -1 if big_s else 1

    def __eq__(self, other: object) -> bool:
        o = self._coerce(other) if isinstance(other, (GoldenNumber, int, Fraction)) else None
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b and self.q == o.q

    def __lt__(self, other: _Coercible) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() < 0

    def __hash__(self) -> int:
        if self.b == 0:
            return hash(Fraction(self.a, self.q))
        return hash((self.a, self.b, self.q))

    def __bool__(self) -> bool:
        return bool(self.a or self.b)

    def __abs__(self) -> GoldenNumber:
        return -self if self.sign() < 0 else self

    # -- enclosures and integer parts ----------------------------------------

    def rational_enclosure(self, precision_bits: int) -> tuple[Fraction, Fraction]:
        """Exact rational interval [lo, hi] containing the value."""
        if self.b == 0:
            x = Fraction(self.a, self.q)
            return x, x
        lo5, hi5 = sqrt5_enclosure(precision_bits)
        s = Fraction(2 * self.a + self.b, 2 * self.q)
        t = Fraction(self.b, 2 * self.q)
        if self.b > 0:
            return s + t * lo5, s + t * hi5
        return s + t * hi5, s + t * lo5

    def float_enclosure(self, precision_bits: int = 53) -> tuple[float, float]:
        """Certified float interval [lo, hi] containing the exact value.

        The rational interval is computed with enough working precision that
        its width is below 2^-precision_bits * max(1, |value|); conversion to
        float then rounds each endpoint outward (at most one ulp per side).
        """
        if precision_bits < 24:
            raise ValueError("precision_bits must be >= 24")
        wp = precision_bits + 8 + abs(self.b).bit_length() + self.q.bit_length()
        lo, hi = self.rational_enclosure(wp)
        return _float_below(lo), _float_above(hi)

    def floor(self) -> int:
        """Exact floor; the enclosure is refined until it pins the integer."""
        if self.b == 0:
            return self.a // self.q
        bits = 32
        while True:
            lo, hi = self.rational_enclosure(bits)
            flo, fhi = lo.__floor__(), hi.__floor__()
            if flo == fhi:
                return flo
            # an integer sits inside the interval: the value is irrational
            # (b != 0), so shrinking the interval must exclude it eventually
            bits *= 2

    def ceil(self) -> int:
        return -(-self).floor()

    def __float__(self) -> float:
        lo, hi = self.float_enclosure(60)
        return (lo + hi) / 2

    def to_text(self) -> str:
        """Canonical text form ``p/q+r/s*t`` (t denotes tau)."""
        rat, gold = self.rat, self.gold
        if gold == 0:
            return _frac_text(rat)
        gold_part = f"{_frac_text(abs(gold))}*t"
        sign = "-" if gold < 0 else "+"
        if rat == 0:
            return gold_part if sign == "+" else "-" + gold_part
        return f"{_frac_text(rat)}{sign}{gold_part}"

    @classmethod
    def from_text(cls, text: str) -> GoldenNumber:
        """Parse ``p/q``, ``r/s*t``, ``p/q+r/s*t`` (whitespace-insensitive)."""
        compact = re.sub(r"\s+", "", text)
        m = _TERM_RE.fullmatch(compact)
        if not m or (m.group("rat") is None and m.group("gold") is None):
            raise ValueError(f"not a golden-number literal: {text!r}")
        rat = Fraction(m.group("rat")) if m.group("rat") else Fraction(0)
        gold = Fraction(0)
        if m.group("gold"):
            g = m.group("gold")
            neg = g.startswith("-")
            g = g.lstrip("+-")
            coeff = g[:-2] if g.endswith("*t") else g[:-1]
            gold = Fraction(coeff) if coeff else Fraction(1)
            if neg:
                gold = -gold
        return cls(rat, gold)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"GoldenNumber.from_text({self.to_text()!r})"

    def __reduce__(self):
        return (_rebuild_gn, (self.a, self.b, self.q))


def _frac_text(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _rebuild_gn(a: int, b: int, q: int) -> GoldenNumber:
    return GoldenNumber._raw(a, b, q)


def sqrt_upper(x: GoldenNumber, precision_bits: int = 64) -> Fraction:
    """A rational upper bound for sqrt(x), x >= 0 (for sizing search boxes)."""
    if x.sign() < 0:
        raise ValueError("sqrt of a negative value")
    hi = x.rational_enclosure(precision_bits)[1]
    if hi <= 0:
        return Fraction(0)
    num, den = hi.numerator, hi.denominator
    # (isqrt(num*den) + 1) / den > sqrt(num*den)/den = sqrt(num/den)
    return Fraction(math.isqrt(num * den) + 1, den)


_ONE = GoldenNumber._raw(1, 0, 1)

ZERO = GoldenNumber._raw(0, 0, 1)
ONE = _ONE
TAU = GoldenNumber._raw(0, 1, 1)
TAU_CONJ = GoldenNumber._raw(1, -1, 1)

GN = GoldenNumber
