import itertools
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from bcl.algebra.audits import jensen_audit, jensen_power, jensen_radius, separation_audit


def _distinct_roots_oracle(n):
    """Distinct roots of all non-zero elements of P_n, clustered at 1e-8 (numpy, float)."""
    pts = []
    for combo in itertools.product((-1, 0, 1), repeat=n + 1):
        c = np.trim_zeros(np.array(combo, dtype=float), "f")
        if len(c) >= 2:
            pts.extend(np.roots(c))
    pts = np.array(sorted(pts, key=lambda z: (round(z.real, 6), round(z.imag, 6))))
    uniq = []
    for z in pts:
        if not any(abs(z - u) < 1e-7 for u in uniq[-400:]):
            uniq.append(z)
    uniq = np.array(uniq)
    d = np.abs(uniq[:, None] - uniq[None, :])
    np.fill_diagonal(d, np.inf)
    return len(uniq), d.min()


@pytest.mark.parametrize("n", [2, 3, 4])
def test_separation_matches_float_oracle(n):
    rep = separation_audit(n)
    count, dmin = _distinct_roots_oracle(n)
    assert rep.summary["distinct_roots"] == count
    assert float(rep.summary["min_distance_approx"]) == pytest.approx(dmin, rel=1e-5)
    assert rep.asserted is False  # below degree 9 the audit only observes


def test_jensen_radius_values():
    assert jensen_power(1) == Fraction(1, 16)
    assert jensen_radius(1).lo == Fraction(1, 4) == jensen_radius(1).hi
    a2 = jensen_radius(2)
    assert a2.lo ** 4 <= Fraction(16, 729) <= a2.hi ** 4


def _jensen_oracle(n, k):
    a = float(mpmath.power(jensen_power(k), mpmath.mpf(1) / (2 * k)))
    worst = 0
    for combo in itertools.product((-1, 0, 1), repeat=n + 1):
        c = np.trim_zeros(np.array(combo, dtype=float), "f")
        if len(c) < 2:
            continue
        c = np.trim_zeros(c, "b")  # drop the zero roots
        if len(c) < 2:
            continue
        worst = max(worst, int(np.sum(np.abs(np.roots(c)) < a)))
    return worst


@pytest.mark.parametrize("k", [1, 2, 3])
def test_jensen_counts_match_float_oracle(k):
    rep = jensen_audit(5, 3)
    assert rep.verdict is True
    assert rep.checks[str(k)]["max_count"] == _jensen_oracle(5, k)
