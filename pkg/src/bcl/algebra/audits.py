"""Exhaustive audits over P_n: root separation and small-root counts."""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import floor

from ..errors import CapExceeded
from ..numerics import PRECISION_CAP, IntervalScalar, nth_root_interval
from ..parallel import chunked, pmap
from ..report import AuditReport, rational_str
from .poly import ENUMERATION_CAP, IntPolynomial, squarefree_decomposition
from .roots import AlgebraicNumber, Disc, algebraic_equal, isolate_squarefree_discs

SEPARATION_CAP = 9
CHUNKS = 27
_PREFIX = 3


def _canonical_polys(n: int, prefix: tuple[int, ...]):
    """Non-zero P in P_n with the given top coefficients, one per {P, -P} pair."""
    rest = n + 1 - len(prefix)
    for combo in itertools.product((-1, 0, 1), repeat=rest):
        coeffs = tuple(reversed(combo)) + tuple(reversed(prefix))
        top = next((c for c in reversed(coeffs) if c), 0)
        if top > 0:
            yield IntPolynomial(coeffs)


def _prefixes(n: int) -> list[tuple[int, ...]]:
    m = min(_PREFIX, n + 1)
    return list(itertools.product((-1, 0, 1), repeat=m))


def _check_cap(n: int) -> None:
    if 3 ** (n + 1) > ENUMERATION_CAP:
        raise CapExceeded(f"P_{n} has 3^{n + 1} members, above the enumeration cap")


# ---------------------------------------------------------------------------
# separation


def _factor_chunk(args: tuple[int, tuple[int, ...]]) -> list[tuple[int, ...]]:
    n, prefix = args
    out = set()
    for p in _canonical_polys(n, prefix):
        for f, _ in squarefree_decomposition(p):
            out.add(f.coeffs)
    return sorted(out)


def _isolate_chunk(factors: list[tuple[int, ...]]) -> list[tuple[tuple[int, ...], list[tuple[Disc, bool]]]]:
    return [(f, isolate_squarefree_discs(f)) for f in factors]


def _cell(d: Disc, tau: Fraction) -> tuple[int, int]:
    cr, ci = d.center
    return floor(cr / tau), floor(ci / tau)


def _pair_distance(a: AlgebraicNumber, b: AlgebraicNumber) -> tuple[Fraction, Fraction, AlgebraicNumber, AlgebraicNumber]:
    """Certified enclosure [lo, hi] of |a - b| for distinct a, b with hi - lo <= lo / 2**10."""
    while True:
        lo = a.disc.distance_lower(b.disc)
        hi = a.disc.distance_upper(b.disc)
        if lo > 0 and (hi - lo) * 1024 <= lo:
            return lo, hi, a, b
        w = max(hi, Fraction(1, 1 << PRECISION_CAP)) / 4096
        if w <= Fraction(1, 1 << PRECISION_CAP):
            raise CapExceeded("could not separate two distinct roots")
        a, b = a.refine(min(w, a.width / 4)), b.refine(min(w, b.width / 4))


def separation_audit(n: int, pair_threshold=Fraction(1, 1000), threads: int = 1,
                     cap: int = SEPARATION_CAP) -> AuditReport:
    """Minimum distance between distinct roots of polynomials in P_n.

    Near pairs come from a grid of cell width ``pair_threshold``; equality of
    two roots of different square-free factors is decided exactly through the
    gcd of the factors.  If no distinct pair is within the threshold, the
    threshold is doubled until one is found, so the reported minimum is global.
    """
    if n < 1:
        raise ValueError("degree must be >= 1")
    if n > cap:
        raise CapExceeded(f"separation audit capped at n = {cap}")
    _check_cap(n)
    tau = Fraction(pair_threshold)
    factor_lists = pmap(_factor_chunk, [(n, p) for p in _prefixes(n)], threads)
    factors = sorted(set().union(*map(set, factor_lists)))
    isolated = []
    for part in pmap(_isolate_chunk, chunked(factors, CHUNKS), threads):
        isolated.extend(part)

    roots: list[AlgebraicNumber] = []
    for f, discs in isolated:
        fp = IntPolynomial(f)
        for d, real in discs:
            roots.append(AlgebraicNumber(fp, d, real))
    roots = [r if r.width < tau / 8 else r.refine(tau / 8) for r in roots]

    grid: dict[tuple[int, int], list[int]] = {}
    reps: list[AlgebraicNumber] = []
    best: tuple | None = None
    near_pairs = duplicates = 0

    def consider(i: int, j: int) -> None:
        nonlocal best, near_pairs
        near_pairs += 1
        lo, hi, a, b = _pair_distance(reps[i], reps[j])
        reps[i], reps[j] = a, b
        key = (lo, hi, min(i, j), max(i, j))
        if best is None or key < best:
            best = key

    for z in roots:
        cx, cy = _cell(z.disc, tau)
        dup = False
        close = []
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for j in grid.get((cx + dx, cy + dy), ()):
                    w = reps[j]
                    if w.disc.distance_lower(z.disc) >= tau:
                        continue
                    if w.defining != z.defining and algebraic_equal(w, z):
                        dup = True
                        break
                    close.append(j)
                if dup:
                    break
            if dup:
                break
        if dup:
            duplicates += 1
            continue
        reps.append(z)
        i = len(reps) - 1
        grid.setdefault((cx, cy), []).append(i)
        for j in close:
            consider(j, i)

    scan_tau = tau
    while best is None and len(reps) > 1:
        scan_tau *= 2
        grid = {}
        for i, z in enumerate(reps):
            cx, cy = _cell(z.disc, scan_tau)
            for dx in (-1, 0, 1):
                for dy in (-1, 0, 1):
                    for j in grid.get((cx + dx, cy + dy), ()):
                        if reps[j].disc.distance_lower(z.disc) < scan_tau:
                            consider(j, i)
            grid.setdefault((cx, cy), []).append(i)

    bound = Fraction(2, n ** (4 * n))
    summary = {
        "square_free_factors": len(factors),
        "roots_isolated": len(roots),
        "distinct_roots": len(reps),
        "duplicate_roots": duplicates,
        "near_pairs": near_pairs,
        "bound": rational_str(bound),
    }
    verdict = None
    if best is not None:
        lo, hi, i, j = best
        a, b = reps[i], reps[j]
        summary["min_distance"] = IntervalScalar.from_bounds(lo, hi, 64).to_json()
        summary["min_distance_approx"] = f"{float(lo):.6e}"
        summary["witness"] = [
            {"defining": a.defining.format(), "root": _approx_str(a)},
            {"defining": b.defining.format(), "root": _approx_str(b)},
        ]
        verdict = lo > bound
    return AuditReport(
        name="separation",
        params={"n": n, "pair_threshold": rational_str(tau)},
        verdict=verdict,
        asserted=n >= 9,
        summary=summary,
    )


def _approx_str(z: AlgebraicNumber) -> str:
    c = z.approx()
    return f"{c.real:.12g}{c.imag:+.12g}j"


# ---------------------------------------------------------------------------
# Jensen


def jensen_power(k: int) -> Fraction:
    """a(k)**(2k) = k**(2k) / (k+1)**(2k+2), exactly."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return Fraction(k ** (2 * k), (k + 1) ** (2 * k + 2))


def jensen_radius(k: int, prec: int = 128) -> IntervalScalar:
    """Enclosure of a(k) = (k/(k+1)) (k+1)**(-1/k)."""
    a2k = IntervalScalar.from_value(jensen_power(k), prec + 16)
    return nth_root_interval(a2k, 2 * k).with_precision(prec)


def _below_radius(z: AlgebraicNumber, k: int) -> tuple[bool, AlgebraicNumber]:
    """Certified test |z| < a(k), refining z as needed."""
    target = jensen_power(k)
    while True:
        m = z.abs_interval(64)
        if (m.hi ** 2) ** k < target:
            return True, z
        if (m.lo ** 2) ** k >= target:
            return False, z
        if z.width < Fraction(1, 1 << PRECISION_CAP):
            raise CapExceeded("root modulus equals a(k) to within the precision cap")
        z = z.refine(z.width / 1024)


def _jensen_chunk(args: tuple[int, tuple[int, ...], int]) -> dict:
    n, prefix, k_max = args
    per_factor: dict[tuple[int, ...], list[int]] = {}
    best = {k: (-1, ()) for k in range(1, k_max + 1)}
    polys = 0
    for p in _canonical_polys(n, prefix):
        polys += 1
        lead_zero = next(i for i, c in enumerate(p.coeffs) if c)
        q = IntPolynomial(p.coeffs[lead_zero:])
        counts = [0] * (k_max + 1)
        if q.degree > 0:
            for f, mult in squarefree_decomposition(q):
                fc = per_factor.get(f.coeffs)
                if fc is None:
                    fc = [0] * (k_max + 1)
                    for d, real in isolate_squarefree_discs(f.coeffs):
                        z = AlgebraicNumber(f, d, real)
                        for k in range(1, k_max + 1):
                            inside, z = _below_radius(z, k)
                            fc[k] += inside
                    per_factor[f.coeffs] = fc
                for k in range(1, k_max + 1):
                    counts[k] += mult * fc[k]
        for k in range(1, k_max + 1):
            c, w = best[k]
            if counts[k] > c or (counts[k] == c and p.coeffs < w):
                best[k] = (counts[k], p.coeffs)
    return {"polys": polys, "best": best}


def jensen_audit(n: int, k_max: int, threads: int = 1) -> AuditReport:
    """For every non-zero P in P_n and k <= k_max, count non-zero roots with |z| < a(k).

    Roots are counted with multiplicity; P and -P share roots so one of each
    pair is examined.
    """
    if n < 0 or k_max < 1:
        raise ValueError("need n >= 0 and k_max >= 1")
    _check_cap(n)
    parts = pmap(_jensen_chunk, [(n, p, k_max) for p in _prefixes(n)], threads)
    polys = 2 * sum(part["polys"] for part in parts)
    per_k = {}
    ok = True
    for k in range(1, k_max + 1):
        c, w = min((part["best"][k] for part in parts), key=lambda t: (-t[0], t[1]))
        per_k[str(k)] = {
            "a_k": jensen_radius(k, 64).to_json(),
            "a_k_pow_2k": rational_str(jensen_power(k)),
            "max_count": c,
            "witness": IntPolynomial(w).format(),
            "holds": c <= k,
        }
        ok &= c <= k
    return AuditReport(
        name="jensen",
        params={"n": n, "k_max": k_max},
        verdict=ok,
        summary={"nonzero_polys": polys, "a_1": rational_str(Fraction(1, 4)),
                 "a_1_check": jensen_power(1) == Fraction(1, 16)},
        checks=per_k,
    )
