"""Exact rationals and outward-rounded dyadic interval arithmetic.

Every inexact real in the package is an :class:`IntervalScalar` whose two
endpoints are dyadic rationals ``m * 2**e``.  Rationals are plain
:class:`fractions.Fraction` values.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Iterable, Sequence, Union

from .errors import NonPositiveArgument, OutOfRange

DEFAULT_PRECISION = 128
PRECISION_CAP = 4096
GUARD_BITS = 16

Real = Union[int, Fraction]


# ---------------------------------------------------------------------------
# dyadic helpers: a dyadic is a pair (m, e) meaning m * 2**e


def _norm(m: int, e: int) -> tuple[int, int]:
    if m == 0:
        return 0, 0
    tz = (m & -m).bit_length() - 1
    if tz:
        m >>= tz
        e += tz
    return m, e


def _round_dyadic(m: int, e: int, prec: int, up: bool) -> tuple[int, int]:
    n = abs(m).bit_length()
    if n <= prec:
        return _norm(m, e)
    s = n - prec
    if up:
        m = -((-m) >> s)
    else:
        m >>= s
    return _norm(m, e + s)


def _round_fraction(num: int, den: int, prec: int, up: bool) -> tuple[int, int]:
    """Round num/den (den > 0) to a dyadic with at most prec+1 mantissa bits."""
    if num == 0:
        return 0, 0
    if den < 0:
        num, den = -num, -den
    if den & (den - 1) == 0:
        # exact dyadic already
        return _round_dyadic(num, -(den.bit_length() - 1), prec, up)
    e = abs(num).bit_length() - den.bit_length() - prec - 1
    if e >= 0:
        q, rem = divmod(num, den << e)
    else:
        q, rem = divmod(num << -e, den)
    if rem and up:
        q += 1
    return _round_dyadic(q, e, prec + 1, up)


def _cmp(m1: int, e1: int, m2: int, e2: int) -> int:
    if e1 <= e2:
        a, b = m1, m2 << (e2 - e1)
    else:
        a, b = m1 << (e1 - e2), m2
    return (a > b) - (a < b)


def _add(m1: int, e1: int, m2: int, e2: int) -> tuple[int, int]:
    if m1 == 0:
        return m2, e2
    if m2 == 0:
        return m1, e1
    if e1 <= e2:
        return m1 + (m2 << (e2 - e1)), e1
    return (m1 << (e1 - e2)) + m2, e2


def _to_fraction(m: int, e: int) -> Fraction:
    return Fraction(m << e) if e >= 0 else Fraction(m, 1 << -e)


def dyadic_str(m: int, e: int) -> str:
    return f"{m}*2^{e}"


def parse_dyadic(text: str) -> Fraction:
    m, e = text.split("*2^")
    return _to_fraction(int(m), int(e))


def to_fraction(x: Real | str | float) -> Fraction:
    """Parse "p/q", decimals, "m*2^e" strings, ints and Fractions exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, float)):
        return Fraction(x)
    x = x.strip()
    if "*2^" in x:
        return parse_dyadic(x)
    return Fraction(x)


# ---------------------------------------------------------------------------


class IntervalScalar:
    """A closed interval [lo, hi] with dyadic endpoints.

    Arithmetic rounds outward to ``prec`` mantissa bits so the true value of
    any expression is always contained in the result.
    """

    __slots__ = ("lo_m", "lo_e", "hi_m", "hi_e", "prec")

    def __init__(self, lo_m: int, lo_e: int, hi_m: int, hi_e: int,
                 prec: int = DEFAULT_PRECISION):
        self.lo_m, self.lo_e = _norm(lo_m, lo_e)
        self.hi_m, self.hi_e = _norm(hi_m, hi_e)
        self.prec = prec
        if _cmp(self.lo_m, self.lo_e, self.hi_m, self.hi_e) > 0:
            raise ValueError("interval with lo > hi")

    # -- construction -------------------------------------------------------

    @classmethod
    def from_value(cls, x: Real | str | float, prec: int = DEFAULT_PRECISION) -> "IntervalScalar":
        q = to_fraction(x)
        lo = _round_fraction(q.numerator, q.denominator, prec, up=False)
        hi = _round_fraction(q.numerator, q.denominator, prec, up=True)
        return cls(*lo, *hi, prec=prec)

    @classmethod
    def from_bounds(cls, lo: Real | str, hi: Real | str,
                    prec: int = DEFAULT_PRECISION) -> "IntervalScalar":
        a, b = to_fraction(lo), to_fraction(hi)
        if a > b:
            raise ValueError("lo > hi")
        return cls(*_round_fraction(a.numerator, a.denominator, prec, False),
                   *_round_fraction(b.numerator, b.denominator, prec, True), prec=prec)

    @classmethod
    def _make(cls, lo: tuple[int, int], hi: tuple[int, int], prec: int) -> "IntervalScalar":
        return cls(*_round_dyadic(*lo, prec, False), *_round_dyadic(*hi, prec, True), prec=prec)

    def with_precision(self, prec: int) -> "IntervalScalar":
        return IntervalScalar._make((self.lo_m, self.lo_e), (self.hi_m, self.hi_e), prec)

    # -- accessors ------------------------------------------------------------

    @property
    def lo(self) -> Fraction:
        return _to_fraction(self.lo_m, self.lo_e)

    @property
    def hi(self) -> Fraction:
        return _to_fraction(self.hi_m, self.hi_e)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def is_point(self) -> bool:
        return self.lo_m == self.hi_m and self.lo_e == self.hi_e

    def contains(self, x: Real | "IntervalScalar") -> bool:
        if isinstance(x, IntervalScalar):
            return self.lo <= x.lo and x.hi <= self.hi
        x = to_fraction(x)
        return self.lo <= x <= self.hi

    def overlaps(self, other: "IntervalScalar") -> bool:
        return not (self.hi < other.lo or other.hi < self.lo)

    def hull(self, other: "IntervalScalar") -> "IntervalScalar":
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        return IntervalScalar.from_bounds(lo, hi, max(self.prec, other.prec))

    def __float__(self) -> float:
        return float(self.mid)

    def __repr__(self) -> str:
        return f"IntervalScalar([{float(self.lo)!r}, {float(self.hi)!r}])"

    def to_json(self) -> dict:
        return {"lo": dyadic_str(self.lo_m, self.lo_e), "hi": dyadic_str(self.hi_m, self.hi_e)}

    @classmethod
    def from_json(cls, obj: dict, prec: int = DEFAULT_PRECISION) -> "IntervalScalar":
        return cls.from_bounds(parse_dyadic(obj["lo"]), parse_dyadic(obj["hi"]), prec)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntervalScalar):
            return NotImplemented
        return (self.lo_m, self.lo_e, self.hi_m, self.hi_e) == (
            other.lo_m, other.lo_e, other.hi_m, other.hi_e)

    def __hash__(self) -> int:
        return hash((self.lo_m, self.lo_e, self.hi_m, self.hi_e))

    # -- arithmetic -----------------------------------------------------------

    def _coerce(self, other) -> "IntervalScalar":
        if isinstance(other, IntervalScalar):
            return other
        return IntervalScalar.from_value(other, self.prec)

    def __neg__(self) -> "IntervalScalar":
        return IntervalScalar(-self.hi_m, self.hi_e, -self.lo_m, self.lo_e, self.prec)

    def __add__(self, other) -> "IntervalScalar":
        o = self._coerce(other)
        prec = max(self.prec, o.prec)
        return IntervalScalar._make(_add(self.lo_m, self.lo_e, o.lo_m, o.lo_e),
                                    _add(self.hi_m, self.hi_e, o.hi_m, o.hi_e), prec)

    __radd__ = __add__

    def __sub__(self, other) -> "IntervalScalar":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "IntervalScalar":
        return self._coerce(other) - self

    def __mul__(self, other) -> "IntervalScalar":
        o = self._coerce(other)
        prec = max(self.prec, o.prec)
        prods = [(a * b, e + f)
                 for a, e in ((self.lo_m, self.lo_e), (self.hi_m, self.hi_e))
                 for b, f in ((o.lo_m, o.lo_e), (o.hi_m, o.hi_e))]
        lo = hi = prods[0]
        for p in prods[1:]:
            if _cmp(*p, *lo) < 0:
                lo = p
            if _cmp(*p, *hi) > 0:
                hi = p
        return IntervalScalar._make(lo, hi, prec)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "IntervalScalar":
        o = self._coerce(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("divisor interval contains 0")
        prec = max(self.prec, o.prec)
        quots = [Fraction(a) * _to_fraction(1, e) / (Fraction(b) * _to_fraction(1, f))
                 for a, e in ((self.lo_m, self.lo_e), (self.hi_m, self.hi_e))
                 for b, f in ((o.lo_m, o.lo_e), (o.hi_m, o.hi_e))]
        lo, hi = min(quots), max(quots)
        return IntervalScalar(*_round_fraction(lo.numerator, lo.denominator, prec, False),
                              *_round_fraction(hi.numerator, hi.denominator, prec, True), prec)

    def __rtruediv__(self, other) -> "IntervalScalar":
        return self._coerce(other) / self

    def __pow__(self, k: int) -> "IntervalScalar":
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        if k == 0:
            return IntervalScalar.from_value(1, self.prec)
        lo, hi = self.lo, self.hi
        if k % 2 == 0 and lo < 0 < hi:
            top = max(-lo, hi) ** k
            return IntervalScalar.from_bounds(0, top, self.prec).with_precision(self.prec)
        a, b = lo ** k, hi ** k
        if a > b:
            a, b = b, a
        return IntervalScalar(*_round_fraction(a.numerator, a.denominator, self.prec, False),
                              *_round_fraction(b.numerator, b.denominator, self.prec, True),
                              self.prec)

    def __abs__(self) -> "IntervalScalar":
        if self.lo_m >= 0:
            return self
        if self.hi_m <= 0:
            return -self
        top = max(-self.lo, self.hi)
        return IntervalScalar.from_bounds(0, top, self.prec)

    # -- certified comparisons -----------------------------------------------

    def certainly_lt(self, other) -> bool:
        o = self._coerce(other)
        return self.hi < o.lo

    def certainly_le(self, other) -> bool:
        o = self._coerce(other)
        return self.hi <= o.lo

    def certainly_gt(self, other) -> bool:
        return self._coerce(other).certainly_lt(self)

    def certainly_positive(self) -> bool:
        return self.lo_m > 0


def interval(x: Real | str | float | IntervalScalar, prec: int = DEFAULT_PRECISION) -> IntervalScalar:
    if isinstance(x, IntervalScalar):
        return x
    return IntervalScalar.from_value(x, prec)


def point_interval(x: Real) -> IntervalScalar:
    """Exact point interval for a dyadic value (raises if x is not dyadic)."""
    q = to_fraction(x)
    d = q.denominator
    if d & (d - 1):
        raise ValueError(f"{q} is not dyadic")
    e = -(d.bit_length() - 1)
    prec = max(DEFAULT_PRECISION, abs(q.numerator).bit_length())
    return IntervalScalar(q.numerator, e, q.numerator, e, prec)


# ---------------------------------------------------------------------------
# square roots


def _isqrt_rational(q: Fraction, bits: int, up: bool) -> Fraction:
    """Directed-rounded sqrt(q) for q >= 0 on a 2**-bits grid (relative)."""
    if q == 0:
        return Fraction(0)
    # choose an even exponent k so that q * 4**k has about 2*bits bits
    k = max(0, bits - (q.numerator.bit_length() - q.denominator.bit_length()) // 2)
    scaled_num = q.numerator << (2 * k)
    s = isqrt(scaled_num // q.denominator)
    if up:
        while s * s * q.denominator < scaled_num:
            s += 1
    return Fraction(s, 1 << k)


def sqrt_interval(x: IntervalScalar) -> IntervalScalar:
    if x.lo < 0:
        raise NonPositiveArgument("sqrt of an interval with negative part")
    bits = x.prec + 2
    lo = _isqrt_rational(x.lo, bits, up=False)
    hi = _isqrt_rational(x.hi, bits, up=True)
    return IntervalScalar.from_bounds(lo, hi, x.prec)


def nth_root_interval(x: IntervalScalar, k: int) -> IntervalScalar:
    """Enclosure of x**(1/k) for x >= 0, integer k >= 1."""
    if x.lo < 0:
        raise NonPositiveArgument("root of an interval with negative part")
    if k == 1:
        return x
    bits = x.prec + 2

    def root(q: Fraction, up: bool) -> Fraction:
        if q == 0:
            return Fraction(0)
        shift = max(0, bits - (q.numerator.bit_length() - q.denominator.bit_length()) // k)
        target = Fraction(q.numerator << (k * shift), q.denominator)
        # integer k-th root of floor(target) by Newton
        t = target.numerator // target.denominator
        s = _iroot(t, k)
        if up:
            while Fraction(s ** k) < target:
                s += 1
        return Fraction(s, 1 << shift)

    return IntervalScalar.from_bounds(root(x.lo, False), root(x.hi, True), x.prec)


def _iroot(t: int, k: int) -> int:
    if t < 2:
        return t
    s = 1 << ((t.bit_length() + k - 1) // k)
    while True:
        nxt = ((k - 1) * s + t // s ** (k - 1)) // k
        if nxt >= s:
            break
        s = nxt
    while s ** k > t:
        s -= 1
    while (s + 1) ** k <= t:
        s += 1
    return s


# ---------------------------------------------------------------------------
# log2 by argument reduction to [1, 2) and repeated squaring


@lru_cache(maxsize=None)
def log2_fixed(num: int, den: int, bits: int) -> tuple[int, int]:
    """Integers (L, U) with L <= 2**bits * log2(num/den) <= U."""
    if num <= 0 or den <= 0:
        raise NonPositiveArgument("log2 of a non-positive number")
    e = num.bit_length() - den.bit_length()
    if (num if e >= 0 else num << -e) < (den << e if e >= 0 else den):
        e -= 1
    # now den * 2**e <= num < den * 2**(e + 1)
    if e >= 0:
        n2, d2 = num, den << e
    else:
        n2, d2 = num << -e, den
    base = e << bits
    if n2 == d2:
        return base, base
    w = bits + 8
    one = 1 << w
    two = one << 1
    xl = (n2 << w) // d2
    xh = -((-(n2 << w)) // d2)
    bl = bh = 0
    for _ in range(bits):
        xl = (xl * xl) >> w
        xh = -((-(xh * xh)) >> w)
        bl <<= 1
        bh <<= 1
        if xl >= two:
            xl >>= 1
            bl |= 1
        if xh >= two:
            xh = -((-xh) >> 1)
            bh |= 1
    return base + bl, base + bh + 1


def log2_rational(q: Real, prec: int = DEFAULT_PRECISION) -> IntervalScalar:
    q = to_fraction(q)
    if q <= 0:
        raise NonPositiveArgument(f"log2 of non-positive {q}")
    bits = prec + GUARD_BITS
    lo, hi = log2_fixed(q.numerator, q.denominator, bits)
    return IntervalScalar(*_round_dyadic(lo, -bits, prec, False),
                          *_round_dyadic(hi, -bits, prec, True), prec)


def log2_interval(x: IntervalScalar) -> IntervalScalar:
    """Enclosure of log2 over x; requires x.lo > 0."""
    if x.lo_m <= 0:
        raise NonPositiveArgument("log2 needs a positive interval")
    bits = x.prec + GUARD_BITS
    lo = log2_fixed(*_as_ratio(x.lo_m, x.lo_e), bits)[0]
    hi = log2_fixed(*_as_ratio(x.hi_m, x.hi_e), bits)[1]
    return IntervalScalar(*_round_dyadic(lo, -bits, x.prec, False),
                          *_round_dyadic(hi, -bits, x.prec, True), x.prec)


def _as_ratio(m: int, e: int) -> tuple[int, int]:
    return (m << e, 1) if e >= 0 else (m, 1 << -e)


def exp2_rational(y: Real, prec: int = DEFAULT_PRECISION) -> IntervalScalar:
    """Enclosure of 2**y for rational y, by bisection against log2."""
    y = to_fraction(y)
    k = y.numerator // y.denominator
    lo = Fraction(2) ** k
    hi = lo * 2
    if y == k:
        return IntervalScalar.from_value(lo, prec)
    for _ in range(prec + 4):
        mid = (lo + hi) / 2
        lg = log2_rational(mid, prec + 8)
        if lg.hi < y:
            lo = mid
        elif lg.lo > y:
            hi = mid
        else:
            break
    return IntervalScalar.from_bounds(lo, hi, prec)


# ---------------------------------------------------------------------------
# entropy kernels


def entropy_term(p: Real, prec: int = DEFAULT_PRECISION) -> IntervalScalar:
    """Enclosure of -p*log2(p) for rational 0 < p <= 1."""
    p = to_fraction(p)
    if not 0 < p <= 1:
        raise OutOfRange(f"probability {p} outside (0, 1]")
    if p == 1:
        return IntervalScalar(0, 0, 0, 0, prec)
    bits = prec + GUARD_BITS
    lo, hi = log2_fixed(p.numerator, p.denominator, bits)
    # -p*log2 p with log2 p in [lo, hi] * 2**-bits and p > 0
    a = Fraction(-hi * p.numerator, p.denominator << bits)
    b = Fraction(-lo * p.numerator, p.denominator << bits)
    return IntervalScalar(*_round_fraction(a.numerator, a.denominator, prec, False),
                          *_round_fraction(b.numerator, b.denominator, prec, True), prec)


def xlogx_fixed(c: int, bits: int) -> tuple[int, int]:
    """Bounds (L, U) on 2**bits * c*log2(c) for a positive integer c."""
    if c == 1:
        return 0, 0
    lo, hi = log2_fixed(c, 1, bits)
    return c * lo, c * hi


def entropy_of_counts(counts: Iterable[int], total: int | None = None,
                      prec: int = DEFAULT_PRECISION) -> IntervalScalar:
    """Shannon entropy (bits) of the distribution counts/total.

    Uses H = log2(T) - (1/T) * sum c*log2(c) with every c*log2(c) bounded in
    fixed point, so the only rounding is a single final one.
    """
    counts = [c for c in counts if c]
    if total is None:
        total = sum(counts)
    bits = prec + GUARD_BITS
    s_lo = s_hi = 0
    for c in counts:
        a, b = xlogx_fixed(c, bits)
        s_lo += a
        s_hi += b
    return fixed_entropy(total, s_lo, s_hi, 1, bits, prec)


def fixed_entropy(total: int, s_lo: int, s_hi: int, scale: int, bits: int,
                  prec: int) -> IntervalScalar:
    """Enclosure of log2(total) - S / (total*scale) where S*2**bits lies in [s_lo, s_hi]."""
    l_lo, l_hi = log2_fixed(total, 1, bits)
    den = total * scale << bits
    lo = Fraction(l_lo * total * scale - s_hi, den)
    hi = Fraction(l_hi * total * scale - s_lo, den)
    return IntervalScalar(*_round_fraction(lo.numerator, lo.denominator, prec, False),
                          *_round_fraction(hi.numerator, hi.denominator, prec, True), prec)


# ---------------------------------------------------------------------------


def interval_eval_poly(coeffs: Sequence[int], x: IntervalScalar | Real) -> IntervalScalar:
    """Horner evaluation of sum coeffs[i] * x**i over an interval argument.

    ``coeffs`` is constant term first; anything exposing ``.coeffs`` works.
    """
    coeffs = getattr(coeffs, "coeffs", coeffs)
    if len(coeffs) == 0:
        raise ValueError("empty coefficient list")
    x = interval(x)
    acc = IntervalScalar.from_value(coeffs[-1], x.prec)
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def sum_intervals(items: Iterable[IntervalScalar], prec: int = DEFAULT_PRECISION) -> IntervalScalar:
    lo_m = lo_e = hi_m = hi_e = 0
    for it in items:
        lo_m, lo_e = _add(lo_m, lo_e, it.lo_m, it.lo_e)
        hi_m, hi_e = _add(hi_m, hi_e, it.hi_m, it.hi_e)
        prec = max(prec, it.prec)
    return IntervalScalar._make((lo_m, lo_e), (hi_m, hi_e), prec)
