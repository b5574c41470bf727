"""Certified root isolation, algebraic numbers and Mahler measure.

Approximate roots come from numpy or mpmath; they are only starting points.
Certification uses the Smith (Braess-Hadeler) inclusion theorem evaluated in
exact Gaussian-integer arithmetic: with distinct approximations z_1..z_d of
the roots of a degree-d polynomial f, every root lies in the union of the
discs |z - z_i| <= d*|f(z_i) / (a_d * prod_{j != i} (z_i - z_j))|, and a
connected component made of k discs holds exactly k roots.  Pairwise
disjoint discs therefore isolate the roots one by one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Sequence

import mpmath
import numpy as np

from ..errors import CapExceeded, NonPositiveArgument, UndecidableAtPrecision
from ..numerics import (DEFAULT_PRECISION, PRECISION_CAP, IntervalScalar,
                        sqrt_interval, to_fraction)
from .poly import IntPolynomial, exact_quotient, gcd_pair, squarefree_decomposition, squarefree_part


@dataclass(frozen=True)
class Disc:
    """Closed disc with centre (re + i*im)/2**k and radius rad/2**k."""

    re: int
    im: int
    rad: int
    k: int

    @property
    def center(self) -> tuple[Fraction, Fraction]:
        s = Fraction(1, 1 << self.k)
        return self.re * s, self.im * s

    @property
    def radius(self) -> Fraction:
        return Fraction(self.rad, 1 << self.k)

    def rescale(self, k: int) -> "Disc":
        """Same disc (or a slightly larger one) on the 2**-k grid, k >= self.k."""
        s = k - self.k
        return Disc(self.re << s, self.im << s, self.rad << s, k)

    def contains_disc(self, other: "Disc") -> bool:
        k = max(self.k, other.k)
        a, b = self.rescale(k), other.rescale(k)
        if b.rad > a.rad:
            return False
        dr, di = a.re - b.re, a.im - b.im
        return dr * dr + di * di <= (a.rad - b.rad) ** 2

    def meets(self, other: "Disc") -> bool:
        k = max(self.k, other.k)
        a, b = self.rescale(k), other.rescale(k)
        dr, di = a.re - b.re, a.im - b.im
        return dr * dr + di * di <= (a.rad + b.rad) ** 2

    def distance_lower(self, other: "Disc", prec: int = 64) -> Fraction:
        """Certified lower bound on the distance between points of the two discs."""
        k = max(self.k, other.k)
        a, b = self.rescale(k), other.rescale(k)
        dr, di = a.re - b.re, a.im - b.im
        d2 = dr * dr + di * di
        # floor(sqrt(d2) * 2**prec) / 2**prec on the 2**-k grid
        lo = Fraction(isqrt(d2 << (2 * prec)), 1 << prec)
        return max(Fraction(0), (lo - a.rad - b.rad) / (1 << k))

    def distance_upper(self, other: "Disc", prec: int = 64) -> Fraction:
        k = max(self.k, other.k)
        a, b = self.rescale(k), other.rescale(k)
        dr, di = a.re - b.re, a.im - b.im
        d2 = dr * dr + di * di
        hi = Fraction(isqrt(d2 << (2 * prec)) + 1, 1 << prec)
        return (hi + a.rad + b.rad) / (1 << k)


# ---------------------------------------------------------------------------
# exact Smith radii


def _smith_radii(coeffs: Sequence[int], centers: Sequence[tuple[int, int]], k: int) -> list[int] | None:
    """Radii (on the 2**-k grid, rounded up) of the Smith inclusion discs.

    Returns None when two centres coincide.
    """
    d = len(coeffs) - 1
    ad = coeffs[-1]
    radii = []
    for i, (a, b) in enumerate(centers):
        # f(z) * 2**(k*d) by scaled Horner in Z[i]
        nr, ni = coeffs[-1], 0
        for m in range(1, d + 1):
            nr, ni = nr * a - ni * b, nr * b + ni * a
            nr += coeffs[d - m] << (k * m)
        pr, pi = 1, 0
        for j, (c, e) in enumerate(centers):
            if j == i:
                continue
            dr, di = a - c, b - e
            if dr == 0 and di == 0:
                return None
            pr, pi = pr * dr - pi * di, pr * di + pi * dr
        num = d * d * (nr * nr + ni * ni)
        den = ad * ad * (pr * pr + pi * pi)
        if num == 0:
            radii.append(0)
            continue
        q = num // den
        s = isqrt(q)
        if s * s * den < num:
            s += 1
        radii.append(s)
    return radii


def _pairwise_disjoint(discs: Sequence[tuple[int, int, int]]) -> bool:
    n = len(discs)
    for i in range(n):
        a, b, r = discs[i]
        for j in range(i + 1, n):
            c, e, s = discs[j]
            dr, di = a - c, b - e
            if dr * dr + di * di <= (r + s) ** 2:
                return False
    return True


# ---------------------------------------------------------------------------
# approximations


def _numpy_roots(coeffs: Sequence[int]) -> list[complex]:
    return list(np.roots([float(c) for c in reversed(coeffs)]))


def _mp_roots(coeffs: Sequence[int], bits: int, start: Sequence[complex] | None) -> list:
    """Newton-polished ``start`` when given, otherwise mpmath's polyroots."""
    with mpmath.workprec(bits):
        if start is not None:
            return _newton_polish(coeffs, start, bits) or []
        try:
            return list(mpmath.polyroots(list(reversed(coeffs)), maxsteps=200 + bits,
                                         extraprec=bits, error=False))
        except mpmath.libmp.NoConvergence:
            return []


def _newton_polish(coeffs: Sequence[int], start, bits: int):
    rev = [mpmath.mpf(c) for c in reversed(coeffs)]
    der = [mpmath.mpf(c * i) for i, c in reversed(list(enumerate(coeffs))) if i]
    out = []
    tol = mpmath.mpf(2) ** (-bits + 8)
    for z in start:
        z = mpmath.mpc(z)
        for _ in range(2 * bits.bit_length() + 10):
            fz = mpmath.polyval(rev, z)
            dz = mpmath.polyval(der, z)
            if dz == 0:
                return None
            step = fz / dz
            z -= step
            if abs(step) <= tol * max(1, abs(z)):
                break
        out.append(z)
    return out


def _symmetrize(approx: Sequence, tol: float) -> list[tuple[float, float]] | list:
    """Snap near-real approximations to the real axis and pair conjugates."""
    pts = [complex(z) if not isinstance(z, (mpmath.mpc, mpmath.mpf)) else z for z in approx]
    out = []
    used = [False] * len(pts)
    for i, z in enumerate(pts):
        if used[i]:
            continue
        im = z.imag
        if abs(im) <= tol * max(1, abs(z)):
            out.append((z.real, 0 * z.real))
            used[i] = True
            continue
        best, bd = None, None
        for j in range(i + 1, len(pts)):
            if used[j]:
                continue
            w = pts[j]
            dist = abs(w - z.conjugate())
            if bd is None or dist < bd:
                best, bd = j, dist
        used[i] = True
        if best is not None and bd <= 1e3 * tol * max(1, abs(z)):
            used[best] = True
            re, ai = z.real, abs(im)
            out.append((re, ai))
            out.append((re, -ai))
        else:
            out.append((z.real, im))
    return out


def _to_grid(x, k: int) -> int:
    if isinstance(x, float):
        return round(Fraction(x) * (1 << k))
    return int(mpmath.nint(mpmath.ldexp(x, k)))


# ---------------------------------------------------------------------------


@lru_cache(maxsize=4096)
def _isolate_cached(coeffs: tuple[int, ...], min_k: int) -> tuple[tuple[Disc, bool], ...]:
    return tuple(_isolate_squarefree(coeffs, min_k))


def _isolate_squarefree(coeffs: tuple[int, ...], min_k: int = 0) -> list[tuple[Disc, bool]]:
    """Disjoint certified discs for a square-free integer polynomial, with realness flags."""
    d = len(coeffs) - 1
    if d < 1:
        return []
    if d == 1:
        q = Fraction(-coeffs[0], coeffs[1])
        k = max(min_k, 0)
        # exact rational root; a dyadic centre needs a radius when q is not dyadic
        num = q.numerator << k
        c, rem = divmod(num, q.denominator)
        if rem == 0 and q.denominator & (q.denominator - 1) == 0:
            return [(Disc(c, 0, 0, k), True)]
        kk = max(k, 64)
        c = round(q * (1 << kk))
        return [(Disc(c, 0, 1, kk), True)]
    small = max(abs(c) for c in coeffs) < 2 ** 50
    seed = _numpy_roots(coeffs) if small else None
    attempts = []
    if small and min_k <= 64:
        attempts.append(("float", 64))
    bits = max(128, min_k + 32)
    while bits <= PRECISION_CAP:
        if seed is not None:
            attempts.append(("newton", bits))
        attempts.append(("mp", bits))
        bits *= 2
    for kind, bits in attempts:
        if kind == "float":
            approx = seed
            tol = 1e-7
        else:
            approx = _mp_roots(coeffs, bits, seed if kind == "newton" else None)
            tol = mpmath.mpf(2) ** (-(bits // 2))
        if len(approx) != d:
            continue
        k = max(bits, min_k)
        sym = _symmetrize(approx, tol)
        if kind != "float":
            with mpmath.workprec(bits + 32):
                centers = [(_to_grid(mpmath.mpf(re), k), _to_grid(mpmath.mpf(im), k)) for re, im in sym]
        else:
            centers = [(_to_grid(re, k), _to_grid(im, k)) for re, im in sym]
        radii = _smith_radii(coeffs, centers, k)
        if radii is None:
            continue
        discs = [(a, b, r) for (a, b), r in zip(centers, radii)]
        if not _pairwise_disjoint(discs):
            continue
        out = []
        ok = True
        for a, b, r in discs:
            if b == 0:
                real = True
            elif abs(b) > r:
                real = False
            else:
                ok = False
                break
            out.append((Disc(a, b, r, k), real))
        if ok:
            return out
    raise CapExceeded(f"root isolation failed below the precision cap for {coeffs}")


def _refine_discs(coeffs: tuple[int, ...], discs: Sequence[tuple[Disc, bool]],
                  target: Fraction) -> list[tuple[Disc, bool]]:
    """Shrink all discs of a square-free polynomial until every radius <= target."""
    cur = list(discs)
    while max(dc.radius for dc, _ in cur) > target:
        k = max(dc.k for dc, _ in cur)
        need = max(k * 2, -_log2_floor(target) + 32)
        if need > PRECISION_CAP * 2:
            raise CapExceeded("root refinement exceeded the precision cap")
        fresh = _isolate_squarefree(coeffs, need)
        matched = []
        for dc, real in cur:
            hits = [(nd, nr) for nd, nr in fresh if nd.meets(dc)]
            if len(hits) != 1:
                raise UndecidableAtPrecision("refined discs do not match the originals")
            matched.append(hits[0])
        cur = matched
    return cur


def _log2_floor(x: Fraction) -> int:
    if x <= 0:
        return -10 ** 6
    return x.numerator.bit_length() - x.denominator.bit_length() - 1


# ---------------------------------------------------------------------------


def _disc_from_interval(lo: Fraction, hi: Fraction, k: int) -> Disc:
    """Smallest grid disc (on 2**-k, k grown as needed) covering [lo, hi]."""
    c = (lo + hi) / 2
    k = max(k, c.denominator.bit_length() + 1, 64)
    cr = round(c * (1 << k))
    rad = (hi - lo) / 2 + abs(Fraction(cr, 1 << k) - c)
    r = -((-rad.numerator << k) // rad.denominator)
    return Disc(cr, 0, r, k)


def _sign_at(coeffs: Sequence[int], x: Fraction) -> int:
    num, den = x.numerator, x.denominator
    d = len(coeffs) - 1
    acc = 0
    for j, c in enumerate(coeffs):
        acc += c * num ** j * den ** (d - j)
    return (acc > 0) - (acc < 0)


class AlgebraicNumber:
    """A root of a square-free primitive integer polynomial, located by a disc.

    Real roots carry an isolating interval refined by exact bisection.
    """

    __slots__ = ("defining", "disc", "real", "multiplicity", "_lo", "_hi")

    def __init__(self, defining: IntPolynomial, disc: Disc, real: bool, multiplicity: int = 1):
        self.defining = defining
        self.disc = disc
        self.real = real
        self.multiplicity = multiplicity
        if real:
            c = disc.center[0]
            self._lo, self._hi = c - disc.radius, c + disc.radius
        else:
            self._lo = self._hi = None

    # -- construction ---------------------------------------------------------

    @classmethod
    def from_isolator(cls, defining: IntPolynomial, lo, hi) -> "AlgebraicNumber":
        """Real root of ``defining`` in [lo, hi]; the interval must hold exactly one."""
        f = squarefree_part(defining)
        lo, hi = to_fraction(lo), to_fraction(hi)
        if lo > hi:
            raise ValueError("isolator lo > hi")
        n = sturm_count(f, lo, hi)
        if n != 1:
            raise ValueError(f"isolator [{lo}, {hi}] holds {n} roots of {defining.format()}, not 1")
        if lo == hi:
            return cls._from_interval(f, lo, hi)
        # shrink to an open sign-change interval on a dyadic grid
        for root in isolate_roots(f):
            if root.real and root._hi >= lo and root._lo <= hi:
                if sturm_count(f, max(lo, root._lo), min(hi, root._hi)) == 1:
                    return root
        raise UndecidableAtPrecision("could not match the isolator with a certified root")

    @classmethod
    def _from_interval(cls, f: IntPolynomial, lo: Fraction, hi: Fraction) -> "AlgebraicNumber":
        out = cls(f, _disc_from_interval(lo, hi, 64), True)
        out._lo, out._hi = lo, hi
        return out

    @classmethod
    def rational(cls, q) -> "AlgebraicNumber":
        q = to_fraction(q)
        f = IntPolynomial((-q.numerator, q.denominator))
        return isolate_roots(f)[0]

    # -- accessors ------------------------------------------------------------

    @property
    def degree(self) -> int:
        return self.defining.degree

    def isolator(self, prec: int = DEFAULT_PRECISION) -> IntervalScalar:
        if not self.real:
            raise ValueError("non-real algebraic number has no real isolator")
        return IntervalScalar.from_bounds(self._lo, self._hi, prec)

    def box(self, prec: int = DEFAULT_PRECISION) -> tuple[IntervalScalar, IntervalScalar]:
        (cr, ci), r = self.disc.center, self.disc.radius
        if self.real:
            return self.isolator(prec), IntervalScalar.from_value(0, prec)
        return (IntervalScalar.from_bounds(cr - r, cr + r, prec),
                IntervalScalar.from_bounds(ci - r, ci + r, prec))

    @property
    def width(self) -> Fraction:
        if self.real:
            return self._hi - self._lo
        return 2 * self.disc.radius

    def approx(self) -> complex:
        cr, ci = self.disc.center
        if self.real:
            return complex(float((self._lo + self._hi) / 2), 0.0)
        return complex(float(cr), float(ci))

    def real_lo(self) -> Fraction:
        return self._lo

    def real_hi(self) -> Fraction:
        return self._hi

    # -- refinement -------------------------------------------------------------

    def refine(self, eps) -> "AlgebraicNumber":
        """A copy whose enclosure has width <= eps."""
        eps = to_fraction(eps)
        if self.width <= eps:
            return self
        if self.real:
            return self._bisect(eps)
        coeffs = self.defining.coeffs
        target = eps / 2
        discs = _refine_discs(coeffs, [(self.disc, False)], target)
        return AlgebraicNumber(self.defining, discs[0][0], False, self.multiplicity)

    def _bisect(self, eps: Fraction) -> "AlgebraicNumber":
        f = self.defining.coeffs
        lo, hi = self._lo, self._hi
        slo = _sign_at(f, lo)
        if slo == 0:
            return self._point(lo)
        shi = _sign_at(f, hi)
        if shi == 0:
            return self._point(hi)
        # snap to a dyadic grid first so later midpoints stay dyadic
        while hi - lo > eps:
            mid = (lo + hi) / 2
            s = _sign_at(f, mid)
            if s == 0:
                return self._point(mid)
            if s == slo:
                lo = mid
            else:
                hi = mid
        out = AlgebraicNumber.__new__(AlgebraicNumber)
        out.defining, out.real, out.multiplicity = self.defining, True, self.multiplicity
        out._lo, out._hi = lo, hi
        out.disc = _disc_from_interval(lo, hi, self.disc.k)
        return out

    def _point(self, x: Fraction) -> "AlgebraicNumber":
        out = AlgebraicNumber.__new__(AlgebraicNumber)
        out.defining, out.real, out.multiplicity = self.defining, True, self.multiplicity
        out._lo = out._hi = x
        out.disc = _disc_from_interval(x, x, self.disc.k)
        return out

    def enclosure(self, prec: int = DEFAULT_PRECISION) -> IntervalScalar:
        """Real enclosure of relative width about 2**-prec."""
        if not self.real:
            raise ValueError("non-real algebraic number")
        mag = max(abs(self._lo), abs(self._hi), Fraction(1, 1 << 32))
        eps = mag / (1 << prec)
        return self.refine(eps).isolator(prec)

    def abs_interval(self, prec: int = DEFAULT_PRECISION) -> IntervalScalar:
        """Enclosure of |z|."""
        if self.real:
            iso = self.isolator(prec)
            return abs(iso)
        cr, ci = self.disc.center
        m2 = IntervalScalar.from_value(cr * cr + ci * ci, prec)
        r = self.disc.radius
        m = sqrt_interval(m2)
        lo = max(Fraction(0), m.lo - r)
        return IntervalScalar.from_bounds(lo, m.hi + r, prec)

    def __repr__(self) -> str:
        z = self.approx()
        tag = f"{z.real:.12g}" if self.real else f"{z.real:.12g}{z.imag:+.12g}j"
        return f"AlgebraicNumber({tag}; root of {self.defining.format()})"

    def to_json(self, prec: int = DEFAULT_PRECISION) -> dict:
        out = {"defining": self.defining.format(), "real": self.real,
               "multiplicity": self.multiplicity}
        if self.real:
            out["isolator"] = self.isolator(prec).to_json()
        else:
            re, im = self.box(prec)
            out["box"] = {"re": re.to_json(), "im": im.to_json()}
        return out


def isolate_roots(p: IntPolynomial, eps=None) -> list[AlgebraicNumber]:
    """One certified, pairwise-disjoint enclosure per distinct complex root of p.

    Multiplicities are attached as metadata.  Roots are ordered by real part,
    then imaginary part, of their centres.
    """
    if p.is_zero():
        raise ValueError("the zero polynomial has no isolated roots")
    out = []
    for f, mult in squarefree_decomposition(p):
        for disc, real in _isolate_cached(f.coeffs, 0):
            out.append(AlgebraicNumber(f, disc, real, mult))
    if eps is not None:
        eps = to_fraction(eps)
        out = [a.refine(eps) for a in out]
    out.sort(key=lambda a: (a.approx().real, a.approx().imag))
    return out


def isolate_squarefree_discs(coeffs: tuple[int, ...]) -> list[tuple[Disc, bool]]:
    """Raw certified discs of a square-free primitive polynomial (cached)."""
    return list(_isolate_cached(tuple(coeffs), 0))


# ---------------------------------------------------------------------------


def sturm_count(f: IntPolynomial, a: Fraction, b: Fraction) -> int:
    """Number of distinct real roots of f in the closed interval [a, b]."""
    f = squarefree_part(f)
    if f.degree <= 0:
        return 0
    seq = _sturm_sequence(f.coeffs)

    def variations(x: Fraction) -> int:
        signs = []
        for c in seq:
            v = 0
            for co in reversed(c):
                v = v * x + co
            if v:
                signs.append(v > 0)
        return sum(1 for s, t in zip(signs, signs[1:]) if s != t)

    n = variations(a) - variations(b)
    if f(a) == 0:
        n += 1
    return n


@lru_cache(maxsize=1 << 16)
def _gcd_cached(a: tuple[int, ...], b: tuple[int, ...]) -> IntPolynomial:
    return gcd_pair(IntPolynomial(a), IntPolynomial(b))


def _excludes_zero(q: Sequence[int], disc: Disc) -> bool:
    """Certify q(z) != 0 on the disc via Taylor expansion at its centre.

    With C the Gaussian-integer centre and S = 2**k, P(w) = sum q_j S^(d-j) w^j
    is shifted to P(C + v) = sum p_j v^j, and q has no zero on the disc when
    |p_0| > sum_{j>=1} |p_j| rad^j.
    """
    d = len(q) - 1
    S = 1 << disc.k
    re = [c * S ** (d - j) for j, c in enumerate(q)]
    im = [0] * (d + 1)
    cr, ci = disc.re, disc.im
    for i in range(d):
        for j in range(d - 1, i - 1, -1):
            r2, i2 = re[j + 1], im[j + 1]
            re[j] += r2 * cr - i2 * ci
            im[j] += r2 * ci + i2 * cr
    tail = 0
    radp = 1
    for j in range(1, d + 1):
        radp *= disc.rad
        tail += (isqrt(re[j] * re[j] + im[j] * im[j]) + 1) * radp
    return re[0] * re[0] + im[0] * im[0] > tail * tail


@lru_cache(maxsize=1 << 16)
def _sturm_sequence(coeffs: tuple[int, ...]) -> tuple[tuple[Fraction, ...], ...]:
    from .poly import divmod_rational
    f = IntPolynomial(coeffs)
    seq = [f.to_rational().coeffs, f.derivative().to_rational().coeffs]
    while len(seq[-1]) > 1:
        _, r = divmod_rational(seq[-2], seq[-1])
        if not r:
            break
        seq.append(tuple(-c for c in r))
    return tuple(seq)


def _root_of_factor(z: AlgebraicNumber, g: IntPolynomial) -> tuple[bool, AlgebraicNumber]:
    """Is z (a root of the square-free f) a root of the divisor g of f?"""
    f = z.defining
    if g.degree == f.degree:
        return True, z
    if z.real:
        lo, hi = z.real_lo(), z.real_hi()
        if lo == hi:
            return g(lo) == 0, z
        return sturm_count(g, lo, hi) > 0, z
    cof = exact_quotient(f, g)
    for _ in range(64):
        if _excludes_zero(cof.coeffs, z.disc):
            return True, z
        if _excludes_zero(g.coeffs, z.disc):
            return False, z
        z = z.refine(z.width / 1024)
    raise UndecidableAtPrecision("could not attribute a root to a factor")


def algebraic_equal(x: AlgebraicNumber, y: AlgebraicNumber, max_rounds: int = 64) -> bool:
    """Exact equality of two algebraic numbers given by defining polynomial and disc.

    x = y forces both to be roots of g = gcd(f_x, f_y).  Once both are known
    to be roots of g, x is a root of f_y and equals y exactly when it lies in
    y's isolating enclosure (and symmetrically).
    """
    if x.real != y.real or not x.disc.meets(y.disc):
        return False
    g = _gcd_cached(x.defining.coeffs, y.defining.coeffs)
    if g.degree < 1:
        return False
    ok, x = _root_of_factor(x, g)
    if not ok:
        return False
    ok, y = _root_of_factor(y, g)
    if not ok:
        return False
    # both are now roots of f_x and of f_y, so containment either way decides
    for _ in range(max_rounds):
        if x.real:
            a, b, c, e = x.real_lo(), x.real_hi(), y.real_lo(), y.real_hi()
            if c <= a and b <= e or a <= c and e <= b:
                return True
            if b < c or e < a:
                return False
        else:
            if y.disc.contains_disc(x.disc) or x.disc.contains_disc(y.disc):
                return True
            if not y.disc.meets(x.disc):
                return False
        x = x.refine(max(x.width / 64, Fraction(1, 1 << PRECISION_CAP)))
        y = y.refine(max(y.width / 4, Fraction(1, 1 << PRECISION_CAP)))
    raise UndecidableAtPrecision("equality of algebraic numbers undecided")


def mahler_measure(p: IntPolynomial, eps=Fraction(1, 10 ** 12),
                   prec: int = DEFAULT_PRECISION) -> IntervalScalar:
    """Enclosure of |a_d| * prod max(1, |root|) (with multiplicity), width <= eps."""
    if p.is_zero():
        raise NonPositiveArgument("Mahler measure of the zero polynomial")
    eps = to_fraction(eps)
    lead = abs(p.leading)
    roots = isolate_roots(p)
    tol = eps / (4 * max(1, p.degree) * (p.l1() + 1))
    while True:
        acc = IntervalScalar.from_value(lead, prec)
        for z in roots:
            if z.real and z.real_lo() == z.real_hi() and abs(z.real_lo()) <= 1:
                continue
            a = z.abs_interval(prec)
            lo, hi = max(Fraction(1), a.lo), max(Fraction(1), a.hi)
            if lo == hi == 1:
                continue
            fac = IntervalScalar.from_bounds(lo, hi, prec)
            for _ in range(z.multiplicity):
                acc = acc * fac
        if acc.width <= eps:
            return acc
        if tol < Fraction(1, 1 << PRECISION_CAP):
            raise CapExceeded("Mahler measure enclosure did not reach the requested width")
        roots = [z.refine(tol) for z in roots]
        tol /= 1 << 16
