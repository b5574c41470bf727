"""Randomised audit of the inequalities satisfied by entropy at a given scale.

Every case draws its own generator from (seed, case index), so results do not
depend on how cases are distributed across workers.
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import floor
from pathlib import Path

from .entropy import cond_entropy, entropy_at_scale_sweep, two_scale_integral
from .measures import AtomicMeasure, convolve, rescale, smooth, step_convolve
from .numerics import IntervalScalar, log2_rational
from .parallel import chunked, pmap
from .report import AuditReport, rational_str

SLACK = Fraction(1, 1 << 40)
CHECKS = ("a", "b", "c", "d", "e", "f", "g", "h")
CHECK_NAMES = {
    "a": "digit bound H(mu; r | 2r) <= 1",
    "b": "monotone and Lipschitz: 0 <= H(r1) - H(r2) <= 2 log(r2/r1)",
    "c": "convolution does not lower H(.; r1 | r2) for integer r2/r1",
    "d": "scaling H(sX; sr) = H(X; r)",
    "e": "integer-ratio subscale keeps half of H(mu; r1 | r2)",
    "f": "more digits: 1 - H(mu; 2r|4r) <= 4 (1 - H(mu; r|2r))",
    "g": "submodularity h(X+Y+Z) + h(Y) <= h(X+Y) + h(Y+Z)",
    "h": "two-scale interpretation of H(X; r/N | r)",
}


def random_measure(rng: random.Random, max_atoms: int, max_exp: int = 12) -> AtomicMeasure:
    """Dyadic atoms (denominator <= 2**max_exp) in [-4, 4] with weights drawn from 1..16."""
    k = rng.randint(1, max_atoms)
    counts: dict[Fraction, int] = {}
    for _ in range(k):
        e = rng.randint(0, max_exp)
        x = Fraction(rng.randint(-4 << e, 4 << e), 1 << e)
        counts[x] = counts.get(x, 0) + rng.randint(1, 16)
    return AtomicMeasure.from_counts(counts)


def random_scale(rng: random.Random) -> Fraction:
    """A scale in roughly [2**-12, 4], dyadic or with a small odd denominator."""
    e = rng.randint(0, 12)
    m = rng.randint(1, 16)
    q = rng.choice((1, 1, 1, 3, 5, 7))
    return Fraction(m, q << e)


def _le(a: IntervalScalar, b: IntervalScalar | Fraction | int, slack=SLACK) -> bool:
    """Certified a <= b up to the slack."""
    b_lo = b.lo if isinstance(b, IntervalScalar) else Fraction(b)
    return a.hi <= b_lo + slack


def _close(a: IntervalScalar, b: IntervalScalar, slack=SLACK) -> bool:
    return _le(a, b, slack) and _le(b, a, slack)


def _h(mu, r, prec):
    return entropy_at_scale_sweep(mu, r, prec).value


def run_case(seed: int, case: int, max_atoms: int = 32, prec: int = 128) -> dict[str, dict]:
    """Evaluate all eight checks on one random case; returns {check: {ok, detail}}."""
    rng = random.Random(f"{seed}:{case}")
    mu = random_measure(rng, max_atoms)
    out: dict[str, dict] = {}
    one = IntervalScalar.from_value(1)

    r = random_scale(rng)
    ha = cond_entropy(mu, r, 2 * r, prec=prec).value
    out["a"] = {"ok": _le(ha, one), "r": r, "value": ha}

    r1 = random_scale(rng)
    r2 = r1 * Fraction(rng.randint(101, 1600), 100)
    d = cond_entropy(mu, r1, r2, prec=prec).value
    lip = 2 * log2_rational(r2 / r1, prec)
    out["b"] = {"ok": _le(IntervalScalar.from_value(0), d) and _le(d, lip),
                "r1": r1, "r2": r2, "value": d}

    nu = random_measure(rng, max(1, max_atoms // 4))
    n_ratio = rng.randint(2, 5)
    r1 = random_scale(rng)
    lhs = cond_entropy(convolve(mu, nu), r1, n_ratio * r1, prec=prec).value
    rhs = cond_entropy(mu, r1, n_ratio * r1, prec=prec).value
    out["c"] = {"ok": _le(rhs, lhs), "r1": r1, "r2": n_ratio * r1, "nu": nu.to_json(),
                "lhs": lhs, "rhs": rhs}

    s = Fraction(rng.randint(1, 15), rng.choice((1, 2, 3, 4, 5, 8)))
    r = random_scale(rng)
    a, b = _h(rescale(mu, s), s * r, prec), _h(mu, r, prec)
    out["d"] = {"ok": _close(a, b), "s": s, "r": r, "scaled": a, "plain": b}

    r1 = random_scale(rng)
    rho = Fraction(rng.randint(200, 2000), 100)
    r2 = rho * r1
    out["e"] = _check_halving(mu, r1, r2, prec)

    r = random_scale(rng)
    g1 = cond_entropy(mu, r, 2 * r, prec=prec).value
    g2 = cond_entropy(mu, 2 * r, 4 * r, prec=prec).value
    out["f"] = {"ok": _le(1 - g2, 4 * (1 - g1)), "r": r, "H_r_2r": g1, "H_2r_4r": g2}

    out["g"] = _check_submodular(rng, max_atoms, prec)

    n_ratio = rng.randint(2, 4)
    r = random_scale(rng)
    direct = two_scale_integral(mu, r, n_ratio, prec)
    via = cond_entropy(mu, r / n_ratio, r, prec=prec).value
    out["h"] = {"ok": _close(direct, via), "r": r, "N": n_ratio, "direct": direct, "difference": via}

    for v in out.values():
        v.setdefault("measure", mu.to_json())
    return out


def _check_halving(mu: AtomicMeasure, r1: Fraction, r2: Fraction, prec: int) -> dict:
    """Look for t1 <= t2 in [r1, r2] with integer t2/t1 and H(t1|t2) >= H(r1|r2)/2.

    With N = floor(r2/r1) the candidates are (r2/N, r2) and (r1, N r1).  Their
    union covers [r1, r2] because N**2 >= r2/r1, so monotonicity of H(.; r)
    forces one of them to carry at least half of H(r1|r2).
    """
    n = floor(r2 / r1)
    whole = cond_entropy(mu, r1, r2, prec=prec).value
    half = whole / 2
    cands = [(r2 / n, r2), (r1, n * r1)]
    vals = [cond_entropy(mu, t1, t2, prec=prec).value for t1, t2 in cands]
    ok = [_le(half, v) for v in vals]
    pick = 0 if ok[0] else 1
    return {"ok": any(ok), "r1": r1, "r2": r2, "N": n, "anchor": "upper" if pick == 0 else "lower",
            "t1": cands[pick][0], "t2": cands[pick][1], "value": vals[pick], "half": half}


def _check_submodular(rng: random.Random, max_atoms: int, prec: int) -> dict:
    small = max(1, min(8, max_atoms // 4))
    x = random_measure(rng, small, 6)
    z = random_measure(rng, small, 6)
    y_atoms = random_measure(rng, 4, 6)
    u = Fraction(rng.randint(1, 8), 1 << rng.randint(0, 6))
    y = smooth(y_atoms, u)
    h_xyz = step_convolve(y, convolve(x, z)).differential_entropy(prec)
    h_y = y.differential_entropy(prec)
    h_xy = step_convolve(y, x).differential_entropy(prec)
    h_yz = step_convolve(y, z).differential_entropy(prec)
    lhs, rhs = h_xyz + h_y, h_xy + h_yz
    return {"ok": _le(lhs, rhs), "u": u, "x": x.to_json(), "y_atoms": y_atoms.to_json(),
            "z": z.to_json(), "lhs": lhs, "rhs": rhs}


def _run_chunk(args: tuple[int, list[int], int, int]) -> list[tuple[int, dict]]:
    seed, cases, max_atoms, prec = args
    return [(c, run_case(seed, c, max_atoms, prec)) for c in cases]


def run_property_suite(seed: int = 1, cases: int = 100, max_atoms: int = 32,
                       prec: int = 128, threads: int = 1,
                       witness_dir: str | Path | None = None) -> AuditReport:
    """Run checks (a)-(h) on ``cases`` random measures; failures become report entries."""
    idx = list(range(cases))
    parts = pmap(_run_chunk, [(seed, ch, max_atoms, prec) for ch in chunked(idx, 32)], threads)
    results = sorted((c, res) for part in parts for c, res in part)
    checks = {k: {"description": CHECK_NAMES[k], "cases": cases, "failures": 0} for k in CHECKS}
    failures = []
    for c, res in results:
        for k in CHECKS:
            if not res[k]["ok"]:
                checks[k]["failures"] += 1
                entry = {"check_id": k, "case": c, "seed": seed}
                if witness_dir is not None:
                    path = Path(witness_dir) / f"witness_{seed}_{c}_{k}.json"
                    path.parent.mkdir(parents=True, exist_ok=True)
                    from .report import dumps
                    path.write_text(dumps(res[k]))
                    entry["witness_file"] = str(path)
                else:
                    entry["witness"] = res[k]
                failures.append(entry)
    for k in CHECKS:
        checks[k]["passed"] = checks[k]["failures"] == 0
    return AuditReport(
        name="props",
        params={"seed": seed, "cases": cases, "max_atoms": max_atoms, "precision": prec,
                "slack": rational_str(SLACK)},
        verdict=not failures,
        checks=checks,
        failures=failures,
    )
