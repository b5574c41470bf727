import itertools
import math
from collections import Counter
from fractions import Fraction

import pytest

from bcl.garsia import (CacheFormatError, cache_entries, decode_level, encode_level, garsia_bounds,
                        level_distribution, read_cache, schedule_levels, write_cache)
from bcl.algebra.poly import IntPolynomial

GOLDEN = IntPolynomial((-1, 1, 1))
GOLDEN_ISO = (Fraction(1, 2), Fraction(1))
TIGHT = Fraction(1, 1 << 40)


def golden_counts(n):
    """Level-n law in Z[lam] with lam^2 = 1 - lam, tracked as pairs (a, b) = a + b lam."""
    counts = Counter()
    for sig in itertools.product((-1, 1), repeat=n):
        a, b = 0, 0
        pa, pb = 1, 0  # lam^0
        for s in sig:
            a, b = a + s * pa, b + s * pb
            pa, pb = pb, pa - pb  # multiply by lam: (pa + pb lam) lam = pb + (pa - pb) lam
        counts[(a, b)] += 1
    return counts


def shannon(counts):
    total = sum(counts.values())
    return -sum(c / total * math.log2(c / total) for c in counts.values())


def test_golden_exact_small_levels():
    rep = garsia_bounds(GOLDEN, GOLDEN_ISO, 3, "dense")
    exact = {1: Fraction(1), 2: Fraction(2), 3: Fraction(11, 4)}
    for lv in rep.levels:
        assert lv.entropy.contains(exact[lv.n])
        assert lv.entropy.width <= TIGHT


@pytest.mark.parametrize("n", range(1, 13))
def test_golden_matches_independent_ring_arithmetic(n):
    rep = garsia_bounds(GOLDEN, GOLDEN_ISO, n, "dense")
    lv = rep.levels[-1]
    ref = golden_counts(n)
    assert lv.support == len(ref)
    assert abs(float(lv.entropy.mid) - shannon(ref)) < 1e-12


def test_half_is_injective():
    rep = garsia_bounds(IntPolynomial((-1, 2)), (Fraction(1, 2), Fraction(1, 2)), 20, "dense")
    for lv in rep.levels:
        assert lv.entropy.contains(lv.n) and lv.entropy.width <= TIGHT
        assert lv.dim_bound.lo == lv.dim_bound.hi == 1
    assert rep.checks["all_hold"]


@pytest.mark.parametrize("poly,iso", [(GOLDEN, GOLDEN_ISO),
                                      (IntPolynomial((-1, 2)), (Fraction(1, 2), Fraction(1, 2))),
                                      (IntPolynomial((-1, 0, 1, 1)), (Fraction(1, 2), Fraction(1)))])
def test_doubling_monotone_and_subadditive(poly, iso):
    rep = garsia_bounds(poly, iso, 16, "doubling")
    assert [lv.n for lv in rep.levels] == [1, 2, 4, 8, 16]
    assert rep.checks["all_hold"]
    per = [lv.per_step for lv in rep.levels]
    assert all(b.hi <= a.lo + TIGHT for a, b in zip(per, per[1:]))


def test_golden_bound_is_capped_at_one():
    # H_16/16 ~ 0.739 still exceeds log2(golden ratio) ~ 0.694, so the bound saturates
    rep = garsia_bounds(GOLDEN, GOLDEN_ISO, 16)
    assert rep.best.n == 16
    assert rep.best.per_step.lo > rep.log2_inverse.hi
    assert rep.best.dim_bound.lo == rep.best.dim_bound.hi == 1


def test_support_cap():
    from bcl.errors import CapExceeded
    with pytest.raises(CapExceeded):
        garsia_bounds(IntPolynomial((-1, 2)), (Fraction(1, 2), Fraction(1, 2)), 16, cap=1000)


def test_schedules():
    assert schedule_levels(20) == [1, 2, 4, 8, 16]
    assert schedule_levels(3, "dense") == [1, 2, 3]
    with pytest.raises(ValueError):
        schedule_levels(0)


def test_parameter_must_be_in_unit_interval():
    with pytest.raises(ValueError):
        garsia_bounds(IntPolynomial((-1, -1, 1)), (Fraction(1), Fraction(2)), 4)


def test_cache_round_trip(tmp_path):
    items = [((1, -2), 3), ((0, 5), 1)]
    data = encode_level(GOLDEN, 2, 1, 4, items)
    assert decode_level(data) == (GOLDEN, 2, 1, 4, items)
    write_cache(tmp_path, GOLDEN, 2, 1, 4, items)
    assert read_cache(tmp_path, GOLDEN, 2) == (1, 4, items)
    assert read_cache(tmp_path, GOLDEN, 3) is None
    with pytest.raises(CacheFormatError):
        decode_level(b"XXXX" + data[4:])
    with pytest.raises(CacheFormatError):
        decode_level(data[:-1])


def test_cache_reuse_gives_identical_report(tmp_path):
    cold = garsia_bounds(GOLDEN, GOLDEN_ISO, 16, cache_dir=tmp_path)
    assert len(cache_entries(tmp_path)) == 5
    warm = garsia_bounds(GOLDEN, GOLDEN_ISO, 16, cache_dir=tmp_path)
    assert cold.to_json() == warm.to_json()
    mu = level_distribution(GOLDEN, GOLDEN_ISO, 8, cache_dir=tmp_path)
    assert sorted(mu.counts) == sorted(golden_counts(8).values())
