import itertools
import math
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from bcl.entropy import (binned_entropy, cond_entropy, entropy_at_scale, entropy_at_scale_smoothed,
                         entropy_at_scale_sweep, sweep_profile, two_scale_integral)
from bcl.errors import NonPositiveArgument
from bcl.measures import (AtomicMeasure, bernoulli_level, convolve, read_atoms, rescale, smooth,
                          write_atoms)

SLACK = Fraction(1, 1 << 40)

dyadic = st.builds(lambda m, e: Fraction(m, 1 << e), st.integers(-64, 64), st.integers(0, 6))
measures = st.dictionaries(dyadic, st.integers(1, 9), min_size=1, max_size=12).map(AtomicMeasure.from_counts)
scales = st.builds(lambda m, e, q: Fraction(m, q << e), st.integers(1, 16), st.integers(0, 8),
                   st.sampled_from([1, 3, 5]))


def float_oracle(mu: AtomicMeasure, r: Fraction) -> float:
    """integral_0^1 H(floor(x/r + t)) dt by midpoint evaluation between breakpoints (floats)."""
    brk = sorted({0.0, 1.0} | {(1 - float(Fraction(x / r) % 1)) % 1 for x in mu.atoms})
    total = 0.0
    for a, b in zip(brk, brk[1:]):
        if b - a <= 0:
            continue
        t = Fraction((a + b) / 2)
        bins = Counter()
        for x, c in zip(mu.atoms, mu.counts):
            bins[math.floor(x / r + t)] += c
        h = -sum(c / mu.total * math.log2(c / mu.total) for c in bins.values())
        total += (b - a) * h
    return total


@given(measures, scales)
def test_sweep_matches_float_oracle(mu, r):
    v = entropy_at_scale_sweep(mu, r).value
    assert abs(float(v.mid) - float_oracle(mu, r)) < 1e-9


@given(measures, scales)
def test_sweep_and_smoothed_agree(mu, r):
    a = entropy_at_scale(mu, r, "sweep").value
    b = entropy_at_scale(mu, r, "smoothed").value
    assert a.overlaps(b)
    assert a.hull(b).width <= SLACK


def test_point_mass_and_separated_atoms():
    assert entropy_at_scale_sweep(AtomicMeasure.delta(3), Fraction(1, 7)).value.contains(0)
    mu = AtomicMeasure.uniform(range(8))
    assert entropy_at_scale_sweep(mu, 1).value.contains(3)
    assert entropy_at_scale_sweep(mu, Fraction(1, 3)).value.contains(3)


def test_two_atoms_at_half_distance():
    # atoms 0 and 1/2 at r = 1 share a bin for half of the offsets
    mu = AtomicMeasure.uniform([0, Fraction(1, 2)])
    assert entropy_at_scale_sweep(mu, 1).value.contains(Fraction(1, 2))


@given(measures, scales, st.integers(2, 5))
def test_conditional_and_two_scale(mu, r, n):
    via = cond_entropy(mu, r / n, r).value
    direct = two_scale_integral(mu, r, n)
    assert via.hull(direct).width <= 4 * SLACK
    assert via.lo >= -SLACK and via.hi <= math.log2(n) + SLACK


@given(measures, scales, st.fractions(min_value=Fraction(1, 8), max_value=8, max_denominator=8))
def test_scale_invariance(mu, r, s):
    a = entropy_at_scale_sweep(rescale(mu, s), s * r).value
    b = entropy_at_scale_sweep(mu, r).value
    assert a.overlaps(b)


@given(measures, scales)
def test_witness_offset_attains_minimum(mu, r):
    prof = sweep_profile(mu, r)
    at_t = binned_entropy(mu, r, prof.witness_t)
    assert at_t.overlaps(prof.witness_entropy)
    assert prof.witness_entropy.lo <= prof.value.hi + SLACK


def test_nonpositive_scale_raises():
    mu = AtomicMeasure.delta(0)
    with pytest.raises(NonPositiveArgument):
        entropy_at_scale_sweep(mu, 0)
    with pytest.raises(NonPositiveArgument):
        entropy_at_scale_sweep(mu, -1)


def test_bernoulli_level_rational_matches_brute_force():
    lam = Fraction(2, 3)
    for n in range(1, 9):
        mu = bernoulli_level(lam, n)
        ref = Counter(sum(s * lam ** j for j, s in enumerate(sig))
                      for sig in itertools.product((-1, 1), repeat=n))
        assert dict(zip(mu.atoms, mu.weights)) == {x: Fraction(c, 2 ** n) for x, c in ref.items()}


def test_golden_level_collapses_exactly():
    from bcl.algebra.poly import IntPolynomial
    from bcl.algebra.roots import AlgebraicNumber
    lam = AlgebraicNumber.from_isolator(IntPolynomial((-1, 1, 1)), Fraction(1, 2), Fraction(1))
    mu = bernoulli_level(lam, 3)
    # 1 - lam - lam^2 = 0, so (+,-,-) and (-,+,+) land on the same atom; H_3 = 2.75
    assert sorted(mu.counts) == [1] * 6 + [2]


def test_convolution_of_bernoulli_levels():
    lam = Fraction(1, 3)
    a = bernoulli_level(lam, 2)
    b = rescale(bernoulli_level(lam, 2), lam ** 2)
    assert convolve(a, b) == bernoulli_level(lam, 4)


def test_smoothed_density_has_unit_mass():
    mu = AtomicMeasure.uniform([0, Fraction(1, 3), 1])
    assert smooth(mu, Fraction(1, 2)).mass() == 1


def test_atom_file_round_trip():
    mu = AtomicMeasure.from_weights({Fraction(1, 3): Fraction(1, 4), Fraction(-2): Fraction(3, 4)})
    assert read_atoms(write_atoms(mu)) == mu
    assert read_atoms('{"atoms": ["1/3", "-2"], "weights": ["1/4", "3/4"]}') == mu
    with pytest.raises(ValueError):
        read_atoms("0,1/2\n1,1/3\n")


def test_smoothed_rejects_field_measures():
    from bcl.algebra.poly import IntPolynomial
    from bcl.algebra.roots import AlgebraicNumber
    lam = AlgebraicNumber.from_isolator(IntPolynomial((-1, 1, 1)), Fraction(1, 2), Fraction(1))
    with pytest.raises(TypeError):
        entropy_at_scale_smoothed(bernoulli_level(lam, 3), Fraction(1, 4))


def test_field_sweep_matches_rational_sweep_on_interval_parameter():
    """An algebraic parameter and a tight rational approximation give close values when no
    atom sits near a breakpoint."""
    from bcl.algebra.poly import IntPolynomial
    from bcl.algebra.roots import AlgebraicNumber
    lam = AlgebraicNumber.from_isolator(IntPolynomial((-2, 0, 3)), Fraction(0), Fraction(1))
    approx = Fraction(816496580927726, 10 ** 15)  # sqrt(2/3)
    r = Fraction(1, 10)
    a = entropy_at_scale_sweep(bernoulli_level(lam, 6), r).value
    b = entropy_at_scale_sweep(bernoulli_level(approx, 6), r).value
    assert abs(float(a.mid) - float(b.mid)) < 1e-6
