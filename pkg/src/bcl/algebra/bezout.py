"""Bezout identities D = sum Q_j P_j for subsets of P_n with controlled heights."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Sequence

from ..errors import AllZero
from .poly import (IntPolynomial, RatPolynomial, SignPolynomial, _padd, _pmul, _strip,
                   divides, divmod_rational, gcd_set, l1_norm, naive_height)


@dataclass(frozen=True)
class BezoutCertificate:
    gcd: IntPolynomial
    members: tuple[SignPolynomial, ...]
    cofactors: tuple[RatPolynomial, ...]
    n: int
    cramer_denominator: int = 1
    notes: tuple[str, ...] = field(default=())

    @property
    def height_bound(self) -> int:
        return 2 ** self.n * factorial(2 * self.n)

    def combination(self) -> RatPolynomial:
        acc = RatPolynomial(())
        for q, p in zip(self.cofactors, self.members):
            acc = acc + q * p.to_rational()
        return acc

    def verify(self) -> dict[str, bool]:
        """Re-check every invariant from scratch in exact arithmetic."""
        ident = (self.combination() - self.gcd.to_rational()).is_zero()
        return {
            "identity": ident,
            "member_count": len(self.members) <= self.n + 1,
            "degrees": all(q.degree <= self.n - 1 for q in self.cofactors),
            "heights": all(naive_height(q) <= self.height_bound for q in self.cofactors),
            "members_in_P_n": all(p.degree <= self.n and all(c in (-1, 0, 1) for c in p.coeffs)
                                  for p in self.members),
        }

    def is_valid(self) -> bool:
        return all(self.verify().values())

    def to_json(self) -> dict:
        return {
            "gcd": self.gcd.format(),
            "n": self.n,
            "members": [p.format() for p in self.members],
            "cofactors": [[str(c) for c in q.coeffs] for q in self.cofactors],
            "max_height": max((naive_height(q) for q in self.cofactors), default=0),
            "height_bound": str(self.height_bound),
            "cramer_denominator": str(self.cramer_denominator),
            "checks": self.verify(),
        }


def _independent_subset(vectors: Sequence[Sequence[int]]) -> list[int]:
    """Indices of a maximal linearly independent subset, chosen greedily in order."""
    basis: list[tuple[int, list[Fraction]]] = []
    chosen = []
    for idx, v in enumerate(vectors):
        row = [Fraction(c) for c in v]
        for piv, b in basis:
            if row[piv]:
                f = row[piv] / b[piv]
                row = [x - f * y for x, y in zip(row, b)]
        piv = next((i for i, x in enumerate(row) if x), None)
        if piv is not None:
            basis.append((piv, row))
            chosen.append(idx)
    return chosen


def _xgcd(a: Sequence, b: Sequence) -> tuple[list, list, list]:
    """(g, s, t) over Q with s*a + t*b = g."""
    r0, r1 = [Fraction(c) for c in _strip(a)], [Fraction(c) for c in _strip(b)]
    s0, s1 = [Fraction(1)], []
    t0, t1 = [], [Fraction(1)]
    while r1:
        q, r = divmod_rational(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, list(_strip(_padd(s0, [-x for x in _pmul(q, s1)])))
        t0, t1 = t1, list(_strip(_padd(t0, [-x for x in _pmul(q, t1)])))
    return r0, s0, t0


def _euclid_combination(polys: Sequence[IntPolynomial], target: IntPolynomial) -> list[list[Fraction]]:
    """Cofactors with sum Q_j P_j = target, by iterated extended Euclid."""
    g = list(polys[0].coeffs)
    cof = [[Fraction(1)]]
    for p in polys[1:]:
        g, s, t = _xgcd(g, p.coeffs)
        cof = [list(_strip(_pmul(s, c))) for c in cof]
        cof.append(list(t))
    scale = Fraction(target.leading) / g[-1]
    return [[x * scale for x in c] for c in cof]


def _reduce_degrees(polys: Sequence[IntPolynomial], cof: list[list[Fraction]]) -> list[list[Fraction]]:
    """Replace Q_j by Q_j mod P_m for j < m, moving the quotient onto Q_m."""
    pm = polys[-1].coeffs
    out = [list(c) for c in cof]
    for j in range(len(polys) - 1):
        q, r = divmod_rational(out[j], pm)
        out[j] = r
        out[-1] = list(_strip(_padd(out[-1], _pmul(q, polys[j].coeffs))))
    return out


def _bareiss_det(m: list[list[int]]) -> int:
    n = len(m)
    if n == 0:
        return 1
    a = [row[:] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if a[i][k]), None)
            if sw is None:
                return 0
            a[k], a[sw] = a[sw], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _height_controlled(polys: Sequence[IntPolynomial], d: IntPolynomial, n: int) -> tuple[list[list[Fraction]], int]:
    """Solve w = sum lam_{j,k} v_{j,k} on a maximal non-singular minor.

    v_{j,k} is the coefficient vector of x^k P_j in Q^{2n}; w that of D.
    """
    dim = 2 * n
    cols = []
    labels = []
    for j, p in enumerate(polys):
        for k in range(n):
            v = [0] * dim
            for i, c in enumerate(p.coeffs):
                v[i + k] = c
            cols.append(v)
            labels.append((j, k))
    w = list(d.coeffs) + [0] * (dim - len(d.coeffs))
    col_idx = _independent_subset(cols)
    rank = len(col_idx)
    sub = [[cols[c][r] for c in col_idx] for r in range(dim)]
    row_idx = _independent_subset(sub)
    assert len(row_idx) == rank
    a = [[Fraction(sub[r][c]) for c in range(rank)] + [Fraction(w[r])] for r in row_idx]
    # Gauss-Jordan on the square non-singular system
    for c in range(rank):
        piv = next(i for i in range(c, rank) if a[i][c])
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for i in range(rank):
            if i != c and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    lam = [a[i][rank] for i in range(rank)]
    det = _bareiss_det([[sub[r][c] for c in range(rank)] for r in row_idx])
    cof = [[Fraction(0)] * n for _ in polys]
    for (j, k), value in zip((labels[c] for c in col_idx), lam):
        cof[j][k] = value
    return [list(_strip(c)) for c in cof], abs(det)


def bezout_certificate(polys: Sequence[IntPolynomial], n: int | None = None) -> BezoutCertificate:
    """Bezout certificate for a subset of P_n, constructed along the classical proof.

    1. keep a linearly independent subset (so at most n+1 members);
    2. combine them by iterated extended Euclid;
    3. reduce cofactors modulo the member of largest degree;
    4. replace the cofactors by the solution of the exact linear system on the
       shifted coefficient vectors restricted to a maximal non-singular minor,
       whose Cramer quotients obey the height bound 2^n (2n)!.
    """
    members = [SignPolynomial(p.coeffs) for p in polys if not p.is_zero()]
    if not members:
        raise AllZero("no non-zero polynomial in the set")
    if n is None:
        n = max(1, max(p.degree for p in members))
    if n < 1:
        raise ValueError("degree bound n must be >= 1")
    if any(p.degree > n for p in members):
        raise ValueError(f"member of degree > {n}")
    d = gcd_set(members)
    vecs = [list(p.coeffs) + [0] * (n + 1 - len(p.coeffs)) for p in members]
    keep = [members[i] for i in _independent_subset(vecs)]
    keep.sort(key=lambda p: p.degree)
    notes = []
    euclid = _euclid_combination(keep, d)
    reduced = _reduce_degrees(keep, euclid)
    if max(len(c) - 1 for c in reduced) > n - 1:
        notes.append("degree reduction left a cofactor of degree >= n")
    cof, det = _height_controlled(keep, d, n)
    pairs = [(p, RatPolynomial(c)) for p, c in zip(keep, cof) if any(c)]
    cert = BezoutCertificate(
        gcd=d,
        members=tuple(p for p, _ in pairs),
        cofactors=tuple(q for _, q in pairs),
        n=n,
        cramer_denominator=det,
        notes=tuple(notes),
    )
    return cert


def divisor_height_ok(d: IntPolynomial, members: Sequence[IntPolynomial], n: int) -> bool | None:
    """l1(d) <= 2^n n when d divides some member; None when no member is divisible."""
    if not any(divides(d, p) for p in members if not p.is_zero()):
        return None
    return l1_norm(d) <= 2 ** n * n
