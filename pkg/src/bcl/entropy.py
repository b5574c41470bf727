"""Entropy at a given scale, computed two independent ways.

``H(X; r) = integral_0^1 H(floor(X/r + t)) dt``.  The sweep evaluates this
integral exactly: the binned distribution only changes at the breakpoints
t = 1 - frac(x_i / r).  The smoothed method uses H(X; r) = h(X + U_r) - log2 r
with U_r uniform on [0, r].
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import floor, lcm

from .errors import NonPositiveArgument, ScaleNotRational
from .measures import AtomicMeasure, NumberField, smooth
from .numerics import (DEFAULT_PRECISION, GUARD_BITS, PRECISION_CAP, IntervalScalar,
                       entropy_of_counts, fixed_entropy, log2_rational, to_fraction,
                       xlogx_fixed)


@dataclass(frozen=True)
class EntropyValue:
    value: IntervalScalar
    method: str
    scales: tuple[Fraction, ...]

    def to_json(self) -> dict:
        from .report import rational_str
        return {"value": self.value.to_json(), "approx": f"{float(self.value.mid):.15g}",
                "method": self.method, "scales": [rational_str(s) for s in self.scales]}


@dataclass(frozen=True)
class SweepResult:
    """Sweep value plus the offset t of the segment with the smallest binned entropy."""

    value: IntervalScalar
    segments: int
    witness_t: Fraction
    witness_entropy: IntervalScalar


def shannon(mu: AtomicMeasure, prec: int = DEFAULT_PRECISION) -> IntervalScalar:
    """Shannon entropy in bits."""
    return entropy_of_counts(mu.counts, mu.total, prec)


def _positive_scale(r) -> Fraction:
    r = to_fraction(r)
    if r <= 0:
        raise NonPositiveArgument("scale must be positive")
    return r


# ---------------------------------------------------------------------------
# sweep, rational atoms


def _sweep_rational(mu: AtomicMeasure, r: Fraction, prec: int) -> SweepResult:
    bits = prec + GUARD_BITS
    bins: dict[int, int] = defaultdict(int)
    moves: dict[Fraction, list[tuple[int, int]]] = defaultdict(list)
    for x, c in zip(mu.atoms, mu.counts):
        y = x / r
        f = floor(y)
        bins[f] += c
        phi = y - f
        if phi:
            moves[1 - phi].append((f, c))
    s_lo = s_hi = 0
    for c in bins.values():
        a, b = xlogx_fixed(c, bits)
        s_lo += a
        s_hi += b
    cuts = sorted(moves)
    den = reduce(lcm, (t.denominator for t in cuts), 1)
    acc_lo = acc_hi = 0
    prev = Fraction(0)
    best = None
    segments = 0
    for t in cuts + [Fraction(1)]:
        if t > prev:
            ln = int((t - prev) * den)
            acc_lo += ln * s_lo
            acc_hi += ln * s_hi
            segments += 1
            key = s_lo + s_hi
            if best is None or key > best[0]:
                best = (key, (prev + t) / 2, s_lo, s_hi)
        if t == 1:
            break
        for f, c in moves[t]:
            for b, delta in ((f, -c), (f + 1, c)):
                old = bins[b]
                if old:
                    # remove exactly the bounds that were added for this bin
                    a, bb = xlogx_fixed(old, bits)
                    s_lo -= a
                    s_hi -= bb
                new = old + delta
                bins[b] = new
                if new:
                    a, bb = xlogx_fixed(new, bits)
                    s_lo += a
                    s_hi += bb
        prev = t
    value = fixed_entropy(mu.total, acc_lo, acc_hi, den, bits, prec)
    witness = fixed_entropy(mu.total, best[2], best[3], 1, bits, prec)
    return SweepResult(value, segments, best[1], witness)


# ---------------------------------------------------------------------------
# sweep, atoms known through enclosures


def _rational_part(mu: AtomicMeasure, atom) -> Fraction | None:
    """The atom as an exact rational when its non-constant coordinates vanish."""
    if any(atom[1:]):
        return None
    return Fraction(atom[0])


def _exact_zero(field, v) -> bool | None:
    return field.is_zero(v)


def _is_integer_multiple(field, atom, r: Fraction, m: int) -> bool | None:
    v = (atom[0] - m * r,) + tuple(atom[1:])
    return _exact_zero(field, v)


def _sweep_embedded(mu: AtomicMeasure, r: Fraction, prec: int,
                    cap: int = PRECISION_CAP) -> SweepResult:
    field = mu.field
    bits = prec + GUARD_BITS
    extra = max(0, (r.denominator.bit_length() - r.numerator.bit_length())) + 32
    work = prec + extra
    while True:
        try:
            return _sweep_embedded_at(mu, r, field, bits, prec, work)
        except _Unsettled:
            work *= 2
            if work > cap + extra:
                raise ScaleNotRational(
                    "breakpoints of the sweep could not be ordered at the precision cap")


class _Unsettled(Exception):
    pass


def _sweep_embedded_at(mu, r, field, bits, prec, work) -> SweepResult:
    rr = IntervalScalar.from_value(r, work)
    floors = []
    breaks = []  # (lo, hi, exact Fraction | None, index)
    for i, atom in enumerate(mu.atoms):
        q = _rational_part(mu, atom) if isinstance(field, NumberField) else None
        if q is not None:
            y = q / r
            f = floor(y)
            floors.append(f)
            if y != f:
                b = 1 - (y - f)
                breaks.append((b, b, b, i))
            continue
        y = field.embed(atom, work) / rr
        f_lo, f_hi = floor(y.lo), floor(y.hi)
        if f_lo != f_hi or y.lo == f_lo:
            # y may be an integer: settle it exactly or refine
            cands = range(f_lo + (0 if y.lo == f_lo else 1), f_hi + 1)
            hit = None
            for m in cands:
                z = _is_integer_multiple(field, atom, r, m)
                if z:
                    hit = m
                    break
                if z is None:
                    raise ScaleNotRational("cannot decide whether an atom lies on the scale lattice")
            if hit is None:
                raise _Unsettled
            floors.append(hit)
            continue
        floors.append(f_lo)
        breaks.append((1 - (y.hi - f_lo), 1 - (y.lo - f_lo), None, i))
    breaks.sort(key=lambda b: (b[0] + b[1], b[3]))
    groups: list[list[tuple]] = []
    for b in breaks:
        if groups and not groups[-1][-1][1] < b[0]:
            head = groups[-1][0]
            if _same_breakpoint(field, mu, r, head, b, floors):
                groups[-1].append(b)
                continue
            raise _Unsettled
        groups.append([b])

    bins: dict[int, int] = defaultdict(int)
    for f, c in zip(floors, mu.counts):
        bins[f] += c
    s_lo = s_hi = 0
    for c in bins.values():
        a, bb = xlogx_fixed(c, bits)
        s_lo += a
        s_hi += bb
    scale = Fraction(1, 1 << bits)
    acc_lo = acc_hi = Fraction(0)
    prev_lo = prev_hi = Fraction(0)
    best = None
    segments = 0
    for g in groups + [None]:
        if g is None:
            nxt_lo = nxt_hi = Fraction(1)
        else:
            nxt_lo = min(b[0] for b in g)
            nxt_hi = max(b[1] for b in g)
        len_lo = max(Fraction(0), nxt_lo - prev_hi)
        len_hi = nxt_hi - prev_lo
        acc_lo += len_lo * s_lo
        acc_hi += len_hi * s_hi
        segments += 1
        key = s_lo + s_hi
        if best is None or key > best[0]:
            best = (key, (prev_hi + nxt_lo) / 2, s_lo, s_hi)
        if g is None:
            break
        for _, _, _, i in g:
            f, c = floors[i], mu.counts[i]
            for b, delta in ((f, -c), (f + 1, c)):
                old = bins[b]
                a, bb = xlogx_fixed(old, bits) if old else (0, 0)
                s_lo -= a
                s_hi -= bb
                new = old + delta
                bins[b] = new
                a, bb = xlogx_fixed(new, bits) if new else (0, 0)
                s_lo += a
                s_hi += bb
        prev_lo, prev_hi = nxt_lo, nxt_hi
    t_total = mu.total
    log_t = log2_rational(t_total, prec + 8)
    integral = IntervalScalar.from_bounds(acc_lo * scale / t_total, acc_hi * scale / t_total, prec + 8)
    value = (log_t - integral).with_precision(prec)
    witness = fixed_entropy(t_total, best[2], best[3], 1, bits, prec)
    return SweepResult(value, segments, best[1], witness)


def _same_breakpoint(field, mu, r, a, b, floors) -> bool:
    """Exact test that two atoms have the same fractional part at scale r."""
    i, j = a[3], b[3]
    if a[2] is not None and b[2] is not None:
        return a[2] == b[2]
    m = floors[i] - floors[j]
    diff = tuple(x - y for x, y in zip(mu.atoms[i], mu.atoms[j]))
    z = _is_integer_multiple(field, diff, r, m)
    if z is None:
        raise ScaleNotRational("two breakpoints cannot be separated at the given interval")
    return z


# ---------------------------------------------------------------------------


def sweep_profile(mu: AtomicMeasure, r, prec: int = DEFAULT_PRECISION) -> SweepResult:
    r = _positive_scale(r)
    if mu.field is None:
        return _sweep_rational(mu, r, prec)
    return _sweep_embedded(mu, r, prec)


def entropy_at_scale_sweep(mu: AtomicMeasure, r, prec: int = DEFAULT_PRECISION) -> EntropyValue:
    """H(mu; r) by exact integration over the offset t."""
    r = _positive_scale(r)
    return EntropyValue(sweep_profile(mu, r, prec).value, "sweep", (r,))


def entropy_at_scale_smoothed(mu: AtomicMeasure, r, prec: int = DEFAULT_PRECISION) -> EntropyValue:
    """H(mu; r) = h(mu * uniform[0, r]) - log2 r."""
    r = _positive_scale(r)
    if mu.field is not None:
        raise TypeError("the smoothed method needs rational atoms")
    h = smooth(mu, r).differential_entropy(prec + 8)
    value = (h - log2_rational(r, prec + 8)).with_precision(prec)
    return EntropyValue(value, "smoothed", (r,))


def entropy_at_scale(mu: AtomicMeasure, r, method: str = "sweep",
                     prec: int = DEFAULT_PRECISION) -> EntropyValue:
    if method == "sweep":
        return entropy_at_scale_sweep(mu, r, prec)
    if method == "smoothed":
        return entropy_at_scale_smoothed(mu, r, prec)
    raise ValueError(f"unknown method {method!r}")


def cond_entropy(mu: AtomicMeasure, r1, r2, method: str = "sweep",
                 prec: int = DEFAULT_PRECISION) -> EntropyValue:
    """H(mu; r1 | r2) = H(mu; r1) - H(mu; r2)."""
    r1, r2 = _positive_scale(r1), _positive_scale(r2)
    a = entropy_at_scale(mu, r1, method, prec).value
    b = entropy_at_scale(mu, r2, method, prec).value
    return EntropyValue(a - b, method, (r1, r2))


def binned_counts(mu: AtomicMeasure, r, t, prec: int = DEFAULT_PRECISION) -> dict[int, int]:
    """Counts of the law of floor(x/r + t) (rational atoms)."""
    r, t = _positive_scale(r), to_fraction(t)
    if mu.field is not None:
        raise TypeError("binning needs rational atoms; use the collision search instead")
    bins: dict[int, int] = defaultdict(int)
    for x, c in zip(mu.atoms, mu.counts):
        bins[floor(x / r + t)] += c
    return dict(bins)


def binned_entropy(mu: AtomicMeasure, r, t, prec: int = DEFAULT_PRECISION) -> IntervalScalar:
    return entropy_of_counts(binned_counts(mu, r, t).values(), mu.total, prec)


def two_scale_integral(mu: AtomicMeasure, r, n: int, prec: int = DEFAULT_PRECISION) -> IntervalScalar:
    """integral_0^1 H(floor(N(X/r + t)) | floor(X/r + t)) dt by a direct joint sweep.

    Independent of :func:`entropy_at_scale_sweep`: every segment re-bins all
    atoms at both resolutions.
    """
    r = _positive_scale(r)
    if mu.field is not None:
        raise TypeError("rational atoms required")
    cuts = {Fraction(0), Fraction(1)}
    ys = [x / r for x in mu.atoms]
    for y in ys:
        for j in range(n):
            c = (Fraction(j, n) - y) % 1
            cuts.add(c)
    cuts = sorted(cuts)
    bits = prec + GUARD_BITS
    den = reduce(lcm, (c.denominator for c in cuts), 1)
    acc_lo = acc_hi = 0
    for a, b in zip(cuts, cuts[1:]):
        t = (a + b) / 2
        coarse: dict[int, int] = defaultdict(int)
        fine: dict[int, int] = defaultdict(int)
        for y, c in zip(ys, mu.counts):
            coarse[floor(y + t)] += c
            fine[floor(n * (y + t))] += c
        sc = [xlogx_fixed(c, bits) for c in coarse.values()]
        sf = [xlogx_fixed(c, bits) for c in fine.values()]
        ln = int((b - a) * den)
        acc_lo += ln * (sum(x for x, _ in sc) - sum(y for _, y in sf))
        acc_hi += ln * (sum(y for _, y in sc) - sum(x for x, _ in sf))
    scale = Fraction(1, (den * mu.total) << bits)
    return IntervalScalar.from_bounds(acc_lo * scale, acc_hi * scale, prec)


def convolution_gain_probe(mu: AtomicMeasure, nu: AtomicMeasure, r1, r2,
                           prec: int = DEFAULT_PRECISION) -> dict:
    """H(mu*nu; r1|r2) - H(mu; r1|r2).  Reported only; nothing is asserted."""
    from .measures import convolve
    r1, r2 = _positive_scale(r1), _positive_scale(r2)
    if not r1 < r2:
        raise ValueError("need r1 < r2")
    base = cond_entropy(mu, r1, r2, prec=prec).value
    conv = cond_entropy(convolve(mu, nu), r1, r2, prec=prec).value
    gain = conv - base
    ratio = r2 / r1
    return {"gain": gain, "conditional_mu": base, "conditional_conv": conv,
            "integer_ratio": ratio.denominator == 1,
            "approx": f"{float(gain.mid):.12g}"}


def monotone_fk_probe(lam, m: int, k_max: int, prec: int = DEFAULT_PRECISION) -> list[dict]:
    """f_k = (H(mu; lam^(2^k) | 1) - 2) / (2^k log2(1/lam)) on the level-m truncation.

    The monotonicity of f_k concerns the infinite convolution; on a truncated
    measure this is a heuristic report, nothing is asserted.
    """
    from .measures import bernoulli_level
    lam = to_fraction(lam)
    mu = bernoulli_level(lam, m)
    loginv = log2_rational(1 / lam, prec)
    h1 = entropy_at_scale_sweep(mu, 1, prec).value
    out = []
    prev = None
    for k in range(k_max + 1):
        r = lam ** (2 ** k)
        hk = entropy_at_scale_sweep(mu, r, prec).value
        fk = (hk - h1 - 2) / (loginv * (2 ** k))
        out.append({"k": k, "f_k": fk, "approx": f"{float(fk.mid):.12g}",
                    "increase": None if prev is None else fk.mid >= prev.mid})
        prev = fk
    return out
