"""Collisions of sign sums, common roots of small polynomials, and the
entropy/approximation dichotomy.

A collision at scale r and offset t is a pair of sign vectors w != w' with
floor(sum w_j lam^j / r + t) == floor(sum w'_j lam^j / r + t).  Its
difference polynomial (w - w') / 2 lies in P_{n-1} and is r-small at lam.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, floor, lcm

from .algebra.bezout import BezoutCertificate, bezout_certificate
from .algebra.poly import IntPolynomial, SignPolynomial, divides, gcd_set
from .algebra.roots import AlgebraicNumber, _disc_from_interval, algebraic_equal, isolate_roots
from .entropy import sweep_profile
from .errors import NoRootInRange, PreconditionUnmet, UndecidableAtPrecision
from .measures import NumberField, _check_parameter, bernoulli_level
from .numerics import (DEFAULT_PRECISION, PRECISION_CAP, IntervalScalar, entropy_of_counts,
                       interval_eval_poly, nth_root_interval, to_fraction)
from .parallel import chunked, pmap
from .report import AuditReport, rational_str

GUARANTEE_FLOOR = 9
DEFAULT_C = Fraction(1, 2)
SLACK = Fraction(1, 1 << 40)
MITM_CHUNKS = 16


# ---------------------------------------------------------------------------
# parameters


def coerce_parameter(lam):
    """AlgebraicNumber, exact Fraction, or IntervalScalar, checked to lie in (0, 1)."""
    if isinstance(lam, IntervalScalar) and lam.is_point():
        lam = lam.lo
    if not isinstance(lam, (AlgebraicNumber, IntervalScalar)):
        lam = to_fraction(lam)
    _check_parameter(lam)
    return lam


def parameter_enclosure(lam, prec: int) -> IntervalScalar:
    if isinstance(lam, AlgebraicNumber):
        return lam.enclosure(prec)
    if isinstance(lam, IntervalScalar):
        return lam
    return IntervalScalar.from_value(lam, prec)


def parameter_json(lam) -> dict:
    if isinstance(lam, AlgebraicNumber):
        return {"kind": "algebraic", **lam.to_json(64)}
    if isinstance(lam, IntervalScalar):
        return {"kind": "interval", "interval": lam.to_json()}
    return {"kind": "rational", "value": rational_str(lam)}


def poly_at(p, lam, prec: int) -> IntervalScalar:
    """Enclosure of p(lam); exactly 0 when lam is algebraic and p vanishes there."""
    coeffs = getattr(p, "coeffs", p)
    if not coeffs:
        return IntervalScalar.from_value(0, prec)
    if isinstance(lam, AlgebraicNumber):
        fld = NumberField(lam)
        if fld.is_zero(fld.reduce(coeffs)):
            return IntervalScalar.from_value(0, prec)
        return fld.embed(fld.reduce(coeffs), prec)
    if isinstance(lam, IntervalScalar):
        return interval_eval_poly(coeffs, lam.with_precision(max(prec, lam.prec)))
    v = sum(Fraction(c) * lam ** j for j, c in enumerate(coeffs))
    return IntervalScalar.from_value(v, prec)


def _log2_ceil(q: Fraction) -> int:
    return max(0, q.numerator.bit_length() - q.denominator.bit_length() + 1)


# ---------------------------------------------------------------------------
# collision search


class _Unsettled(Exception):
    pass


@dataclass(frozen=True)
class _SumModel:
    """Fixed-point enclosures L_j <= S * lam**j <= U_j plus what is needed for exact ties."""

    n: int
    scale: int
    lower: tuple[int, ...]
    upper: tuple[int, ...]
    exact: bool
    field: NumberField | None = None
    den: int = 1
    powers: tuple[tuple[int, ...], ...] = ()

    @classmethod
    def build(cls, lam, n: int, bits: int) -> "_SumModel":
        if isinstance(lam, Fraction):
            p, q = lam.numerator, lam.denominator
            ints = tuple(p ** j * q ** (n - 1 - j) for j in range(n))
            return cls(n, q ** (n - 1), ints, ints, True)
        if isinstance(lam, IntervalScalar):
            lo, hi = [], []
            acc = IntervalScalar.from_value(1, max(bits, lam.prec))
            for _ in range(n):
                lo.append(floor(acc.lo * (1 << bits)))
                hi.append(-floor(-acc.hi * (1 << bits)))
                acc = acc * lam
            return cls(n, 1 << bits, tuple(lo), tuple(hi), False)
        fld = NumberField(lam)
        vecs = [fld.power(j) for j in range(n)]
        den = 1
        for v in vecs:
            for c in v:
                den = lcm(den, c.denominator)
        ints = tuple(tuple(int(c * den) for c in v) for v in vecs)
        lo, hi = [], []
        for v in vecs:
            e = fld.embed(v, bits + 8)
            lo.append(floor(e.lo * (1 << bits)))
            hi.append(-floor(-e.hi * (1 << bits)))
        return cls(n, 1 << bits, tuple(lo), tuple(hi), False, fld, den, ints)

    def half_sums(self, idx: range) -> list[tuple[int, int, int, tuple[int, ...] | None]]:
        """(mask, lo, hi, vector) for every sign choice on the coordinates ``idx``."""
        out = []
        k = len(idx)
        for m in range(1 << k):
            lo = hi = 0
            vec = [0] * len(self.powers[0]) if self.field is not None else None
            mask = 0
            for b, j in enumerate(idx):
                if m >> b & 1:
                    lo += self.lower[j]
                    hi += self.upper[j]
                    mask |= 1 << j
                    if vec is not None:
                        vec = [a + c for a, c in zip(vec, self.powers[j])]
                else:
                    lo -= self.upper[j]
                    hi -= self.lower[j]
                    if vec is not None:
                        vec = [a - c for a, c in zip(vec, self.powers[j])]
            out.append((mask, lo, hi, tuple(vec) if vec is not None else None))
        return out

    def bins(self, lo: int, hi: int, vec, r: Fraction, t: Fraction) -> tuple[list[int], bool]:
        """Candidate bins of floor(X / r + t) for X in [lo, hi] / scale; flag = ambiguous."""
        a, b = r.numerator, r.denominator
        c, e = t.numerator, t.denominator
        den = a * e * self.scale
        shift = c * a * self.scale
        f_lo = (lo * b * e + shift) // den
        f_hi = (hi * b * e + shift) // den
        if f_lo == f_hi:
            return [f_lo], False
        if self.field is not None:
            if f_hi - f_lo > 1:
                raise _Unsettled
            # X lies on or near the bin edge m * r - t * r; decide exactly
            m = f_hi
            edge = (m - t) * r
            v = [Fraction(x, self.den) for x in vec]
            v[0] -= edge
            if self.field.is_zero(v):
                return [m], False
            raise _Unsettled
        return list(range(f_lo, f_hi + 1)), True


def _stream_chunk(args) -> list[list[tuple[int, int, bool]]]:
    model, h, highs, r, t = args
    lows = model.half_sums(range(h))
    streams = []
    for hmask, hlo, hhi, hvec in highs:
        items = []
        for lmask, llo, lhi, lvec in lows:
            vec = None if hvec is None else tuple(x + y for x, y in zip(lvec, hvec))
            cands, amb = model.bins(llo + hlo, lhi + hhi, vec, r, t)
            for a in cands:
                items.append((a, lmask | hmask, amb))
        items.sort()
        streams.append(items)
    return streams


def signs_of(mask: int, n: int) -> tuple[int, ...]:
    return tuple(1 if mask >> j & 1 else -1 for j in range(n))


def difference_poly(w: tuple[int, ...], w2: tuple[int, ...]) -> SignPolynomial:
    """(w - w') / 2, sign-normalised so that the leading coefficient is positive."""
    coeffs = [(a - b) // 2 for a, b in zip(w, w2)]
    p = IntPolynomial(coeffs)
    if p.coeffs and p.coeffs[-1] < 0:
        coeffs = [-c for c in coeffs]
    return SignPolynomial(coeffs)


@dataclass
class CollisionSet:
    n: int
    r: Fraction
    t: Fraction
    pairs: list[tuple[tuple[int, ...], tuple[int, ...]]]
    difference_polys: list[SignPolynomial]
    bin_sizes: list[int]
    policy: str = "strict"
    uncertified: list[int] = field(default_factory=list)
    certified: bool = True
    max_abs_value: IntervalScalar | None = None

    @property
    def binned_entropy(self) -> IntervalScalar:
        return entropy_of_counts(self.bin_sizes, 1 << self.n)

    def to_json(self, with_pairs: bool = True) -> dict:
        out = {
            "n": self.n, "r": rational_str(self.r), "t": rational_str(self.t),
            "policy": self.policy, "certified": self.certified,
            "pair_count": len(self.pairs),
            "occupied_bins": len(self.bin_sizes),
            "largest_bin": max(self.bin_sizes) if self.bin_sizes else 0,
            "binned_entropy": self.binned_entropy.to_json(),
            "difference_polys": [p.format() for p in self.difference_polys],
            "uncertified_polys": [self.difference_polys[i].format() for i in self.uncertified],
            "max_abs_value": self.max_abs_value.to_json() if self.max_abs_value else None,
        }
        if with_pairs:
            out["pairs"] = [[list(a), list(b)] for a, b in self.pairs]
        return out


def collision_search(lam, n: int, r, t=0, policy: str = "strict",
                     prec: int = DEFAULT_PRECISION, threads: int = 1,
                     cap: int = PRECISION_CAP) -> CollisionSet:
    """All pairs of sign vectors sharing a bin of floor(X / r + t), by meet in the middle.

    Sums are split into a low half (coordinates < ceil(n/2)) kept in memory
    and a streamed high half.  Each high-half stream is sorted by bin and the
    streams are merged with a heap, so equal-bin runs appear consecutively and
    no pair is ever compared directly.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if policy not in ("strict", "inclusive"):
        raise ValueError("policy must be 'strict' or 'inclusive'")
    lam = coerce_parameter(lam)
    r, t = to_fraction(r), to_fraction(t)
    if r <= 0:
        raise ValueError("r must be positive")
    h = (n + 1) // 2
    bits = prec + _log2_ceil(1 / r) + n + 32
    while True:
        model = _SumModel.build(lam, n, bits)
        highs = model.half_sums(range(h, n))
        try:
            parts = pmap(_stream_chunk, [(model, h, ch, r, t) for ch in chunked(highs, MITM_CHUNKS)],
                         threads)
            break
        except _Unsettled:
            if bits > cap + _log2_ceil(1 / r) + n + 32:
                raise UndecidableAtPrecision("bin membership undecided at the precision cap")
            bits *= 2
    streams = [s for part in parts for s in part]
    ambiguous = any(amb for s in streams for _, _, amb in s)
    if ambiguous and policy == "strict":
        raise UndecidableAtPrecision(
            "a sign sum straddles a bin edge; the parameter interval is too wide")

    pairs = set()
    sizes = []
    run: list[int] = []
    cur = None
    for a, mask, _ in heapq.merge(*streams):
        if a != cur:
            if run:
                sizes.append(len(run))
            cur, run = a, []
        run.append(mask)
        for m in run[:-1]:
            pairs.add((min(m, mask), max(m, mask)))
    if run:
        sizes.append(len(run))

    pair_list = sorted(tuple(sorted((signs_of(a, n), signs_of(b, n)))) for a, b in pairs)
    polys = sorted({difference_poly(a, b) for a, b in pair_list}, key=lambda p: p.coeffs)

    # certify |P(lam)| <= r for every emitted difference polynomial
    uncertified = []
    worst = None
    for i, p in enumerate(polys):
        lo = sum(c * (model.lower[j] if c > 0 else model.upper[j]) for j, c in enumerate(p.coeffs))
        hi = sum(c * (model.upper[j] if c > 0 else model.lower[j]) for j, c in enumerate(p.coeffs))
        mag = max(abs(lo), abs(hi))
        if mag > r * model.scale:
            uncertified.append(i)
        val = IntervalScalar.from_bounds(Fraction(lo, model.scale), Fraction(hi, model.scale), prec)
        worst = abs(val) if worst is None or abs(val).hi > worst.hi else worst
    if uncertified and policy == "strict":
        raise UndecidableAtPrecision("|P(lambda)| <= r could not be certified for a collision")
    return CollisionSet(n, r, t, pair_list, polys, sorted(sizes), policy, uncertified,
                        not ambiguous and not uncertified, worst)


def brute_force_pairs(lam, n: int, r, t=0) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Reference O(4**n) pair scan for exact rational parameters (testing aid)."""
    lam, r, t = to_fraction(lam), to_fraction(r), to_fraction(t)
    vecs = [signs_of(m, n) for m in range(1 << n)]
    bins = [floor(sum(w * lam ** j for j, w in enumerate(v)) / r + t) for v in vecs]
    out = []
    for i in range(len(vecs)):
        for j in range(len(vecs)):
            if i != j and bins[i] == bins[j] and vecs[i] < vecs[j]:
                out.append((vecs[i], vecs[j]))
    return sorted(out)


# ---------------------------------------------------------------------------
# common roots


def bezout_gcd_factor(n: int) -> int:
    """(n+1) 2^(2n+1) (2n)!: the bound |D(lam)| <= factor * r."""
    return (n + 1) * 2 ** (2 * n + 1) * factorial(2 * n)


def explicit_bound(r: Fraction, n: int, prec: int) -> IntervalScalar:
    """r^(1/n) (2n)^2."""
    return nth_root_interval(IntervalScalar.from_value(r, prec), n) * ((2 * n) ** 2)


def power_bound(x: Fraction, c: Fraction, prec: int) -> IntervalScalar:
    """x^c for rational c > 0 and x > 0."""
    c = to_fraction(c)
    base = IntervalScalar.from_value(x, prec) ** c.numerator
    return nth_root_interval(base, c.denominator)


def _distance(root: AlgebraicNumber, lam_iv: IntervalScalar) -> IntervalScalar:
    lam_disc = _disc_from_interval(lam_iv.lo, lam_iv.hi, 64)
    if root.real:
        d = abs(root.isolator(lam_iv.prec + 8) - lam_iv)
        return d
    lo = root.disc.distance_lower(lam_disc, lam_iv.prec)
    hi = root.disc.distance_upper(lam_disc, lam_iv.prec)
    return IntervalScalar.from_bounds(lo, hi, lam_iv.prec)


@dataclass
class ApproximationCertificate:
    eta: AlgebraicNumber
    distance: IntervalScalar
    gcd: IntPolynomial
    vanishing: list[SignPolynomial]
    bound_exponent: str
    bound: IntervalScalar
    bezout: BezoutCertificate
    d_at_lambda: IntervalScalar
    n: int
    r: Fraction
    checks: dict = field(default_factory=dict)
    sharp: dict = field(default_factory=dict)
    eta_equals_lambda: bool | None = None

    @property
    def valid(self) -> bool:
        return all(v for v in self.checks.values() if isinstance(v, bool))

    def to_json(self) -> dict:
        return {
            "eta": self.eta.to_json(128),
            "eta_equals_lambda": self.eta_equals_lambda,
            "distance": self.distance.to_json(),
            "gcd": self.gcd.format(),
            "vanishing": [p.format() for p in self.vanishing],
            "bound_exponent": self.bound_exponent,
            "bound": self.bound.to_json(),
            "d_at_lambda": self.d_at_lambda.to_json(),
            "n": self.n,
            "r": rational_str(self.r),
            "bezout": self.bezout.to_json(),
            "checks": self.checks,
            "sharp": self.sharp,
        }


def _as_sign_polys(A) -> list[SignPolynomial]:
    out = []
    for p in A:
        if isinstance(p, str):
            p = IntPolynomial.parse(p)
        out.append(SignPolynomial(getattr(p, "coeffs", p)))
    return out


def common_root_certificate(A, lam, n: int, r, c=DEFAULT_C, prec: int = DEFAULT_PRECISION,
                            floor_n: int = GUARANTEE_FLOOR) -> ApproximationCertificate:
    """Common root eta of the r-small polynomials A, nearest to lam.

    The bound |eta - lam| <= |D(lam)|^(1/deg D) (product of root distances)
    is always asserted.  The explicit r^(1/n) (2n)^2 bound needs
    r < (2n)^(-2n) and is asserted for n >= ``floor_n``, where
    (n+1) 2^(2n+1) (2n)! < (2n)^(2n) holds.  The r^c claim has a
    non-explicit constant and is only reported.
    """
    A = _as_sign_polys(A)
    if not A:
        raise PreconditionUnmet("empty polynomial set")
    if any(p.is_zero() for p in A):
        raise PreconditionUnmet("the zero polynomial is not allowed")
    if any(p.degree > n for p in A):
        raise PreconditionUnmet(f"a polynomial has degree > {n}")
    lam = coerce_parameter(lam)
    r = to_fraction(r)
    if r <= 0:
        raise PreconditionUnmet("r must be positive")
    explicit_ok = r < Fraction(1, (2 * n) ** (2 * n))
    sharp_ok = r <= Fraction(1, n ** (3 * n))
    if not (explicit_ok or sharp_ok):
        raise PreconditionUnmet("r is too large for both the explicit and the r^c bound")

    work = prec + _log2_ceil(1 / r) + 16
    for p in A:
        v = abs(poly_at(p, lam, work))
        if v.hi > r:
            raise PreconditionUnmet(f"|P(lambda)| <= r is not certified for {p.format()}")

    D = gcd_set(A)
    bez = bezout_certificate(A, n)
    factor = bezout_gcd_factor(n)
    d_val = abs(poly_at(D, lam, work))
    checks = {
        "bezout_valid": bez.is_valid(),
        "gcd_matches_bezout": bez.gcd == D,
        "d_small": d_val.hi <= factor * r,
        "divides_all": all(divides(D, p) for p in A),
    }
    if D.degree < 1:
        raise NoRootInRange("the polynomials have no common root (constant gcd)")

    roots = isolate_roots(D)
    exact = None
    if isinstance(lam, AlgebraicNumber) and d_val.hi == 0:
        exact = next((z for z in roots if z.real and algebraic_equal(z, lam)), None)
    if exact is not None:
        eta = exact
        dist = IntervalScalar.from_value(0, prec)
    else:
        eta, dist = _nearest_root(roots, lam, prec, work)

    d = D.degree
    lead = abs(D.leading)
    product_bound = nth_root_interval(IntervalScalar.from_value(d_val.hi / lead, prec), d)
    checks["within_product_bound"] = dist.hi <= product_bound.hi
    if explicit_ok and n >= floor_n:
        bound, label = explicit_bound(r, n, prec), "r^(1/n)*(2n)^2"
        checks["within_explicit_bound"] = dist.hi < bound.lo
    else:
        bound, label = product_bound, "|D(lambda)|^(1/deg D)"
        checks["within_explicit_bound"] = None
    if not checks["within_product_bound"] or checks["within_explicit_bound"] is False:
        raise NoRootInRange("no root of the gcd lies within the asserted bound")
    c = to_fraction(c)
    rc = power_bound(r, c, prec)
    sharp = {"c": rational_str(c), "precondition": sharp_ok, "bound": rc.to_json(),
             "holds": dist.hi <= rc.lo, "asserted": False}
    vanishing = [p for p in A if divides(D, p)]
    return ApproximationCertificate(
        eta=eta, distance=dist, gcd=D, vanishing=vanishing, bound_exponent=label, bound=bound,
        bezout=bez, d_at_lambda=d_val, n=n, r=r, checks=checks, sharp=sharp,
        eta_equals_lambda=(exact is not None) if isinstance(lam, AlgebraicNumber) else None)


def _nearest_root(roots, lam, prec: int, work: int) -> tuple[AlgebraicNumber, IntervalScalar]:
    """Root with certified minimal distance to lam, refining until it stands out."""
    tol = Fraction(1, 1 << 32)
    for _ in range(64):
        lam_iv = parameter_enclosure(lam, work)
        dists = [_distance(z, lam_iv) for z in roots]
        best = min(range(len(roots)), key=lambda i: (dists[i].hi, i))
        others = [dists[i].lo for i in range(len(roots)) if i != best]
        if all(dists[best].hi < o for o in others):
            return roots[best], dists[best].with_precision(prec)
        if tol < Fraction(1, 1 << work) or isinstance(lam, IntervalScalar) and tol < lam.width:
            return roots[best], dists[best].with_precision(prec)
        roots = [z.refine(tol) for z in roots]
        tol /= 1 << 32
    return roots[best], dists[best].with_precision(prec)


def verify_certificate(cert: ApproximationCertificate, lam, prec: int = 2 * DEFAULT_PRECISION) -> dict:
    """Re-check a certificate from scratch: fresh gcd, fresh isolation, fresh evaluation."""
    lam = coerce_parameter(lam)
    D = gcd_set(cert.vanishing)
    out = {"gcd_recomputed": D == cert.gcd,
           "vanishing_divisible": all(divides(D, p) for p in cert.vanishing),
           "eta_root_of_gcd": divides(cert.eta.defining, D)}
    fresh = [z for z in isolate_roots(D) if algebraic_equal(z, cert.eta)]
    out["eta_isolated"] = len(fresh) == 1
    work = prec + _log2_ceil(1 / cert.r) + 16
    for p in cert.vanishing:
        if abs(poly_at(p, lam, work)).hi > cert.r:
            out["small_at_lambda"] = False
            break
    else:
        out["small_at_lambda"] = True
    if cert.eta_equals_lambda:
        out["distance_within_bound"] = isinstance(lam, AlgebraicNumber) and algebraic_equal(lam, cert.eta)
    else:
        z = fresh[0] if fresh else cert.eta
        d = _distance(z.refine(Fraction(1, 1 << prec)), parameter_enclosure(lam, work))
        out["distance_within_bound"] = d.hi <= cert.bound.hi
    out["bezout_valid"] = cert.bezout.is_valid()
    out["all_hold"] = all(out.values())
    return out


# ---------------------------------------------------------------------------
# dichotomy


def sums_separated(mu, r: Fraction, prec: int = DEFAULT_PRECISION) -> bool:
    """True iff the measure has 2**n distinct atoms pairwise at distance >= r."""
    if any(c != 1 for c in mu.counts):
        return False
    if mu.field is None:
        xs = sorted(mu.atoms)
        return all(b - a >= r for a, b in zip(xs, xs[1:]))
    ordered = mu.ordered(prec)
    if len(ordered.atoms) != len(mu.atoms):
        return False
    fld = mu.field
    for a, b in zip(ordered.atoms, ordered.atoms[1:]):
        gap = tuple(y - x for x, y in zip(a, b))
        p = prec
        while True:
            g = fld.embed(gap, p)
            if g.lo >= r:
                break
            if g.hi < r:
                return False
            probe = (gap[0] - r,) + gap[1:]
            if fld.is_zero(probe):
                break
            p *= 2
            if p > PRECISION_CAP:
                raise UndecidableAtPrecision("atom gap versus r undecided")
    return True


@dataclass
class EntropyWitness:
    n: int
    r: Fraction
    value: IntervalScalar
    separated: bool

    @property
    def verdict(self) -> bool:
        return self.separated and self.value.contains(self.n)

    def to_json(self) -> dict:
        return {"kind": "entropy_witness", "n": self.n, "r": rational_str(self.r),
                "H": self.value.to_json(), "H_equals_n": self.separated,
                "enclosure_contains_n": self.value.contains(self.n), "verdict": self.verdict}


@dataclass
class DichotomyResult:
    n: int
    r: Fraction
    parameter: object
    entropy: IntervalScalar
    witness: EntropyWitness | None = None
    collisions: CollisionSet | None = None
    certificate: ApproximationCertificate | None = None
    h_eta: dict | None = None
    guaranteed: bool = False
    verification: dict | None = None

    @property
    def kind(self) -> str:
        return "entropy_witness" if self.witness is not None else "approximation"

    @property
    def ok(self) -> bool:
        if self.witness is not None:
            return self.witness.verdict
        good = self.certificate.valid and bool(self.collisions.pairs)
        if self.h_eta is not None:
            good = good and self.h_eta["consistent"]
        if self.verification is not None:
            good = good and self.verification["all_hold"]
        return good

    def to_json(self) -> dict:
        out = {"kind": self.kind, "n": self.n, "r": rational_str(self.r),
               "parameter": parameter_json(self.parameter), "H": self.entropy.to_json(),
               "H_approx": f"{float(self.entropy.mid):.15g}",
               "guaranteed_range": self.guaranteed, "ok": self.ok}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        else:
            out["collisions"] = self.collisions.to_json(with_pairs=False)
            out["certificate"] = self.certificate.to_json()
            out["h_eta"] = self.h_eta
            out["verification"] = self.verification
        return out


def dichotomy(lam, n: int, r, prec: int = 2 * DEFAULT_PRECISION, threads: int = 1,
              c=DEFAULT_C, floor_n: int = GUARANTEE_FLOOR) -> DichotomyResult:
    """Either H(mu; r) = n for the level-n sign sums, or a common root eta of the
    collision polynomials close to lam with h_eta <= H / n."""
    lam = coerce_parameter(lam)
    r = to_fraction(r)
    if n < 2:
        raise PreconditionUnmet("n must be >= 2")
    if not 0 < r <= Fraction(1, n ** (3 * n)):
        raise PreconditionUnmet("the scale must satisfy 0 < r <= n^(-3n)")
    mu = bernoulli_level(lam, n)
    sweep = sweep_profile(mu, r, prec)
    res = DichotomyResult(n, r, lam, sweep.value, guaranteed=n >= floor_n)
    if sums_separated(mu, r, prec):
        res.witness = EntropyWitness(n, r, sweep.value, True)
        return res
    cs = collision_search(lam, n, r, sweep.witness_t, prec=prec, threads=threads)
    res.collisions = cs
    cert = common_root_certificate(cs.difference_polys, lam, n, r, c=c, prec=prec, floor_n=floor_n)
    res.certificate = cert
    res.verification = verify_certificate(cert, lam, 2 * prec)
    res.h_eta = _h_eta_bound(cert.eta, n, cs, sweep.value, prec)
    return res


def _h_eta_bound(eta: AlgebraicNumber, n: int, cs: CollisionSet, H: IntervalScalar,
                 prec: int) -> dict | None:
    """h_eta <= H_n(eta) / n <= (binned entropy at t) / n <= H / n."""
    if not eta.real:
        return None
    e = eta.refine(Fraction(1, 1 << 32))
    if not (0 < e.real_lo() and e.real_hi() < 1):
        return None
    from .garsia import level_distribution
    lev = level_distribution(eta.defining, (e.real_lo(), e.real_hi()), n)
    Hn = entropy_of_counts(lev.counts, lev.total, prec)
    Hb = cs.binned_entropy
    return {
        "H_n_eta": Hn.to_json(),
        "h_eta_upper": (Hn / n).to_json(),
        "h_eta_upper_approx": f"{float((Hn / n).hi):.15g}",
        "binned_entropy": Hb.to_json(),
        "collapsed_by_eta": Hn.hi <= Hb.lo + SLACK,
        "binned_below_H": Hb.hi <= H.lo + SLACK,
        "consistent": Hn.hi <= Hb.lo + SLACK and Hb.hi <= H.lo + SLACK,
        "below_one_bit": (Hn / n).hi < 1,
    }


# ---------------------------------------------------------------------------


def _root_of_some_sign_poly(eta: AlgebraicNumber, n: int, poly=None) -> bool:
    if poly is not None:
        p = IntPolynomial.parse(poly) if isinstance(poly, str) else IntPolynomial(getattr(poly, "coeffs", poly))
        return (p.degree <= n and all(x in (-1, 0, 1) for x in p.coeffs)
                and divides(eta.defining, p) and not p.is_zero())
    f = eta.defining
    return f.degree <= n and all(x in (-1, 0, 1) for x in f.coeffs)


def full_entropy_check(lam, eta: AlgebraicNumber, n: int, c=DEFAULT_C,
                       prec: int = 2 * DEFAULT_PRECISION, poly=None) -> AuditReport:
    """Certify H(mu_lam level n; r) = n at r = |lam - eta|^(1/c), rounded down."""
    lam = coerce_parameter(lam)
    c = to_fraction(c)
    if not _root_of_some_sign_poly(eta, n, poly):
        raise PreconditionUnmet("eta is not certified as a root of a polynomial in P_n")
    if isinstance(lam, AlgebraicNumber) and algebraic_equal(lam, eta):
        raise PreconditionUnmet("lambda equals eta")
    bound = Fraction(1, n ** (4 * n))
    work = prec + 8 * n * max(1, n.bit_length()) + 64
    dist = None
    for _ in range(8):
        dist = _distance(eta.refine(Fraction(1, 1 << work)), parameter_enclosure(lam, work))
        if dist.lo > 0 or dist.hi >= bound:
            break
        work *= 2
    if not dist.lo > 0:
        raise PreconditionUnmet("|lambda - eta| is not certifiably positive")
    if not dist.hi < bound:
        raise PreconditionUnmet("|lambda - eta| < n^(-4n) is not certified")
    # r = dist^(1/c), rounded down to a dyadic rational
    inv = 1 / c
    r_iv = power_bound(dist.lo, inv, work)
    r = r_iv.lo
    scale = 1 << (_log2_ceil(1 / r) + prec)
    r = Fraction(floor(r * scale), scale)
    if r <= 0:
        raise PreconditionUnmet("rounded scale vanished")
    mu = bernoulli_level(lam, n)
    sweep = sweep_profile(mu, r, prec)
    separated = sums_separated(mu, r, prec)
    verdict = separated and sweep.value.contains(n)
    return AuditReport(
        name="full-check",
        params={"n": n, "c": rational_str(c), "lambda": parameter_json(lam),
                "eta": eta.to_json(64), "precision": prec},
        verdict=verdict,
        summary={"distance": dist.with_precision(prec).to_json(), "distance_bound": rational_str(bound),
                 "r": rational_str(r), "H": sweep.value.to_json(),
                 "H_approx": f"{float(sweep.value.mid):.15g}", "H_equals_n": separated,
                 "guaranteed_range": n >= GUARANTEE_FLOOR},
    )
