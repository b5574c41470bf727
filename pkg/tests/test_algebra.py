"""Polynomial arithmetic, root isolation, Mahler measure and Bezout certificates.

sympy and mpmath serve as independent oracles.
"""

import random
from fractions import Fraction
from math import factorial

import mpmath
import pytest
import sympy
from hypothesis import assume, given, strategies as st

from bcl.algebra.bezout import bezout_certificate, divisor_height_ok
from bcl.algebra.poly import (IntPolynomial, SignPolynomial, divides, enumerate_signpolys, gcd_pair,
                              gcd_set, l1_norm, squarefree_decomposition, squarefree_part)
from bcl.algebra.roots import (AlgebraicNumber, algebraic_equal, isolate_roots, mahler_measure,
                               sturm_count)
from bcl.errors import AllZero, CapExceeded, NonPositiveArgument

X = sympy.Symbol("x")
sign_coeffs = st.lists(st.integers(-1, 1), min_size=1, max_size=9)
int_coeffs = st.lists(st.integers(-20, 20), min_size=1, max_size=7)


def to_sympy(p: IntPolynomial):
    return sympy.Poly(list(reversed(p.coeffs)) or [0], X)


def primitive_monic_sign(p: IntPolynomial) -> tuple:
    """Canonical form (primitive, positive leading coefficient) for comparison."""
    if p.is_zero():
        return ()
    q = p.primitive()
    return q.coeffs if q.leading > 0 else tuple(-c for c in q.coeffs)


def test_parse_format_round_trip():
    p = IntPolynomial.parse("-1,-1,1")
    assert p.coeffs == (-1, -1, 1) and p.format() == "-1,-1,1"
    assert p(Fraction(1, 2)) == Fraction(-5, 4)
    assert IntPolynomial.parse("0").is_zero()


def test_sign_polynomial_rejects_large_coefficients():
    with pytest.raises(ValueError):
        SignPolynomial((2, 1))


@given(int_coeffs, int_coeffs)
def test_gcd_matches_sympy(a, b):
    pa, pb = IntPolynomial(a), IntPolynomial(b)
    assume(not (pa.is_zero() and pb.is_zero()))
    g = gcd_pair(pa, pb)
    ref = sympy.gcd(to_sympy(pa), to_sympy(pb))
    ref_coeffs = IntPolynomial(reversed([int(c) for c in ref.all_coeffs()]))
    assert primitive_monic_sign(g) == primitive_monic_sign(ref_coeffs)
    if not pa.is_zero():
        assert divides(g, pa)


@given(st.lists(sign_coeffs, min_size=1, max_size=5))
def test_gcd_set_divides_every_member(cs):
    polys = [IntPolynomial(c) for c in cs]
    assume(any(not p.is_zero() for p in polys))
    g = gcd_set(polys)
    assert all(divides(g, p) for p in polys if not p.is_zero())


@given(int_coeffs)
def test_squarefree_decomposition_multiplies_back(c):
    p = IntPolynomial(c)
    assume(p.degree >= 1)
    parts = squarefree_decomposition(p)
    prod = IntPolynomial((1,))
    for f, m in parts:
        prod = prod * f ** m
    assert primitive_monic_sign(prod) == primitive_monic_sign(p)
    sf = squarefree_part(p)
    assert sympy.degree(sympy.gcd(to_sympy(sf), to_sympy(sf).diff(X)), X) == 0


def test_enumeration_counts_and_cap():
    assert sum(1 for _ in enumerate_signpolys(3)) == 81
    with pytest.raises(CapExceeded):
        next(enumerate_signpolys(20))


@given(int_coeffs)
def test_isolation_counts_match_sympy(c):
    p = IntPolynomial(c)
    assume(p.degree >= 1)
    roots = isolate_roots(p)
    sp = to_sympy(p)
    distinct = sympy.roots(sp, multiple=False) if p.degree <= 2 else None
    n_real = len(sympy.real_roots(sympy.Poly(sympy.sqf_part(sp.as_expr()), X)))
    assert sum(1 for r in roots if r.real) == n_real
    assert len(roots) == sympy.degree(sympy.sqf_part(sp.as_expr()), X)
    if distinct is not None:
        assert len(roots) == len(distinct)


@given(int_coeffs)
def test_isolating_enclosures_contain_mpmath_roots(c):
    p = IntPolynomial(c)
    assume(p.degree >= 1 and len(set(c)) > 1)
    f = squarefree_part(p)
    assume(f.degree >= 1)
    with mpmath.workdps(40):
        ref = mpmath.polyroots(list(reversed(f.coeffs)), maxsteps=200, extraprec=200)
    for z in ref:
        hits = [r for r in isolate_roots(f) if abs(r.approx() - complex(z)) < 1e-6]
        assert len(hits) == 1


def test_sturm_counts():
    f = IntPolynomial((-2, 0, 1))  # x^2 - 2
    assert sturm_count(f, Fraction(0), Fraction(2)) == 1
    assert sturm_count(f, Fraction(-2), Fraction(2)) == 2
    assert sturm_count(f, Fraction(2), Fraction(3)) == 0


def test_algebraic_number_from_isolator_and_refine():
    phi_inv = AlgebraicNumber.from_isolator(IntPolynomial((-1, 1, 1)), Fraction(1, 2), Fraction(1))
    tight = phi_inv.refine(Fraction(1, 10 ** 30))
    ref = (mpmath.sqrt(5) - 1) / 2
    assert tight.real_lo() <= Fraction(str(ref)) + Fraction(1, 10 ** 14)
    assert tight.real_hi() - tight.real_lo() <= Fraction(1, 10 ** 30)
    with pytest.raises(ValueError):
        AlgebraicNumber.from_isolator(IntPolynomial((-1, 1, 1)), Fraction(-2), Fraction(1))


def test_algebraic_equal_across_definitions():
    # the golden root of x^2+x-1 is also a root of (x^2+x-1)(x^3-x+1)
    g = IntPolynomial((-1, 1, 1))
    big = g * IntPolynomial((1, -1, 0, 1))
    a = AlgebraicNumber.from_isolator(g, Fraction(1, 2), Fraction(1))
    b = AlgebraicNumber.from_isolator(big, Fraction(1, 2), Fraction(1))
    c = AlgebraicNumber.from_isolator(IntPolynomial((-2, 0, 1)), Fraction(1), Fraction(2))
    assert algebraic_equal(a, b)
    assert not algebraic_equal(a, c)


@given(sign_coeffs, sign_coeffs, sign_coeffs)
def test_algebraic_equal_on_shared_factors(a, b, c):
    common, u, v = IntPolynomial(a), IntPolynomial(b), IntPolynomial(c)
    assume(common.degree >= 1 and u.degree >= 0 and v.degree >= 0)
    f, g = squarefree_part(common * u), squarefree_part(common * v)
    roots_f, roots_g = isolate_roots(f), isolate_roots(g)
    for z in isolate_roots(squarefree_part(common)):
        mf = [w for w in roots_f if algebraic_equal(w, z)]
        mg = [w for w in roots_g if algebraic_equal(w, z)]
        assert len(mf) == 1 and len(mg) == 1


def test_mahler_exact_values():
    m = mahler_measure(IntPolynomial((-2, 1)))
    assert m.lo == 2 and m.hi == 2
    phi = mahler_measure(IntPolynomial((-1, -1, 1)))
    gold = (1 + mpmath.sqrt(5)) / 2
    assert phi.width <= Fraction(1, 10 ** 12)
    assert float(phi.lo) - 1e-15 <= gold <= float(phi.hi) + 1e-15
    with pytest.raises(NonPositiveArgument):
        mahler_measure(IntPolynomial(()))


@given(int_coeffs)
def test_mahler_matches_mpmath(c):
    p = IntPolynomial(c)
    assume(p.degree >= 1)
    m = mahler_measure(p, Fraction(1, 10 ** 9))
    with mpmath.workdps(50):
        rts = mpmath.polyroots(list(reversed(p.coeffs)), maxsteps=400, extraprec=400)
        ref = abs(p.leading) * mpmath.fprod(max(1, abs(z)) for z in rts)
    assert abs(float(m.mid) - float(ref)) <= 1e-7 * max(1.0, float(ref))


@given(st.lists(st.lists(st.integers(-1, 1), min_size=2, max_size=7), min_size=1, max_size=5))
def test_bezout_certificate_invariants(cs):
    polys = [SignPolynomial(c) for c in cs]
    assume(any(not p.is_zero() for p in polys))
    cert = bezout_certificate(polys, 6)
    checks = cert.verify()
    assert all(checks.values()), checks
    assert cert.height_bound == 2 ** 6 * factorial(12)
    ok = divisor_height_ok(cert.gcd, polys, 6)
    assert ok is not False
    assert all(divides(cert.gcd, p) for p in polys if not p.is_zero())


def test_bezout_all_zero():
    with pytest.raises(AllZero):
        bezout_certificate([SignPolynomial(())], 3)


def test_bezout_random_p10_subsets():
    rng = random.Random(7)
    for _ in range(20):
        polys = [SignPolynomial(rng.choice((-1, 0, 1)) for _ in range(11)) for _ in range(rng.randint(1, 5))]
        if all(p.is_zero() for p in polys):
            continue
        cert = bezout_certificate(polys, 10)
        assert cert.is_valid()
        if divisor_height_ok(cert.gcd, polys, 10) is not None:
            assert l1_norm(cert.gcd) <= 2 ** 10 * 10
