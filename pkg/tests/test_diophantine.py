import itertools
from collections import defaultdict
from fractions import Fraction
from math import floor

import mpmath
import pytest
from hypothesis import given, strategies as st

from bcl.algebra.poly import IntPolynomial, SignPolynomial
from bcl.algebra.roots import AlgebraicNumber, algebraic_equal
from bcl.diophantine import (GUARANTEE_FLOOR, bezout_gcd_factor, collision_search,
                             common_root_certificate, dichotomy, difference_poly,
                             full_entropy_check, verify_certificate)
from bcl.errors import PreconditionUnmet

GOLDEN = AlgebraicNumber.from_isolator(IntPolynomial((-1, 1, 1)), Fraction(1, 2), Fraction(1))


def oracle_pairs(value, n, r, t):
    """Pairs of sign vectors sharing floor(X/r + t), from a direct bin table."""
    bins = defaultdict(list)
    for v in itertools.product((-1, 1), repeat=n):
        bins[floor(value(v) / r + t)].append(v)
    return sorted(p for members in bins.values() for p in itertools.combinations(sorted(members), 2))


def rational_value(lam):
    return lambda v: sum(s * lam ** j for j, s in enumerate(v))


@pytest.mark.parametrize("lam", [Fraction(3, 5), Fraction(2, 3), Fraction(5, 7), Fraction(7, 10)])
@pytest.mark.parametrize("n", [3, 6, 10])
@pytest.mark.parametrize("r,t", [(Fraction(1, 50), 0), (Fraction(1, 7), Fraction(1, 3)),
                                 (Fraction(1, 1000), Fraction(2, 5))])
def test_collisions_match_bin_table(lam, n, r, t):
    cs = collision_search(lam, n, r, t)
    assert sorted(cs.pairs) == oracle_pairs(rational_value(lam), n, r, t)
    assert cs.certified


@given(st.fractions(min_value=Fraction(1, 5), max_value=Fraction(9, 10), max_denominator=40),
       st.integers(2, 8),
       st.fractions(min_value=Fraction(1, 200), max_value=Fraction(1, 2), max_denominator=300),
       st.fractions(min_value=0, max_value=1, max_denominator=12))
def test_collisions_property(lam, n, r, t):
    assert sorted(collision_search(lam, n, r, t).pairs) == oracle_pairs(rational_value(lam), n, r, t)


def test_golden_collisions_match_high_precision_oracle():
    with mpmath.workdps(60):
        g = (mpmath.sqrt(5) - 1) / 2
        value = lambda v: mpmath.fsum(s * g ** j for j, s in enumerate(v))  # noqa: E731
        for n, r in [(3, Fraction(1, 10 ** 6)), (6, Fraction(1, 1000)), (8, Fraction(1, 37))]:
            t = Fraction(1, 3)
            bins = defaultdict(list)
            for v in itertools.product((-1, 1), repeat=n):
                bins[int(mpmath.floor(value(v) / mpmath.mpf(r.numerator) * r.denominator + mpmath.mpf(1) / 3))].append(v)
            ref = sorted(p for m in bins.values() for p in itertools.combinations(sorted(m), 2))
            assert sorted(collision_search(GOLDEN, n, r, t).pairs) == ref


def test_difference_polynomials_are_small_sign_polys():
    lam, n, r = Fraction(2, 3), 8, Fraction(1, 100)
    cs = collision_search(lam, n, r)
    assert cs.pairs
    for w, w2 in cs.pairs:
        p = difference_poly(w, w2)
        assert isinstance(p, SignPolynomial) and p.degree <= n - 1 and p.leading > 0
        assert abs(p(lam)) * 2 < r


def test_golden_exact_collision_at_tiny_scale():
    cs = collision_search(GOLDEN, 3, Fraction(1, 10 ** 9))
    assert cs.pairs == [((-1, 1, 1), (1, -1, -1))]
    assert [p.format() for p in cs.difference_polys] == ["-1,1,1"]


def test_bezout_factor_chain_starts_at_nine():
    # (n+1) 2^(2n+1) (2n)! < (2n)^(2n) is what lets the explicit bound be asserted
    assert GUARANTEE_FLOOR == 9
    assert bezout_gcd_factor(9) < 18 ** 18
    assert bezout_gcd_factor(8) >= 16 ** 16


def test_certificate_on_multiples_of_the_minimal_polynomial():
    P = SignPolynomial((-1, 1, 1))
    cert = common_root_certificate([P, P.shift(1)], GOLDEN, 9, Fraction(1, 9 ** 27))
    assert cert.valid and cert.eta_equals_lambda
    assert cert.gcd.format() == "-1,1,1"
    assert verify_certificate(cert, GOLDEN)["all_hold"]


def test_certificate_preconditions():
    P = SignPolynomial((-1, 1, 1))
    with pytest.raises(PreconditionUnmet):
        common_root_certificate([P], GOLDEN, 4, Fraction(1, 10))
    with pytest.raises(PreconditionUnmet):
        common_root_certificate([SignPolynomial(())], GOLDEN, 4, Fraction(1, 4 ** 12))


def test_dichotomy_rational_half_is_a_witness():
    res = dichotomy(Fraction(1, 2), 8, Fraction(1, 8 ** 24))
    assert res.kind == "entropy_witness" and res.ok
    assert res.entropy.lo == res.entropy.hi == 8


def test_dichotomy_golden_small_level():
    res = dichotomy(GOLDEN, 6, Fraction(1, 6 ** 18))
    assert res.kind == "approximation" and res.ok
    assert res.certificate.eta_equals_lambda and algebraic_equal(res.certificate.eta, GOLDEN)
    assert res.h_eta["below_one_bit"]


def test_dichotomy_rejects_large_scale():
    with pytest.raises(PreconditionUnmet):
        dichotomy(Fraction(1, 2), 4, Fraction(1, 100))


def test_full_check_near_golden():
    lam = Fraction(4181, 6765)  # Fibonacci convergent, within 1e-8 of the golden root
    rep = full_entropy_check(lam, GOLDEN, 3)
    assert rep.verdict is True and rep.passed


def test_full_check_rejects_far_or_equal_parameters():
    with pytest.raises(PreconditionUnmet):
        full_entropy_check(Fraction(3, 5), GOLDEN, 3)
    with pytest.raises(PreconditionUnmet):
        full_entropy_check(GOLDEN, GOLDEN, 3)
