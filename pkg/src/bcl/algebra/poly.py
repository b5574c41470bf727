"""Integer and rational polynomials, constant term first."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Callable, Iterable, Iterator, Sequence

from ..errors import AllZero, CapExceeded

ENUMERATION_CAP = 3 ** 13


def _strip(coeffs: Iterable) -> tuple:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class IntPolynomial:
    """Polynomial with integer coefficients; the zero polynomial is ``()``."""

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Iterable[int] = ()):
        object.__setattr__(self, "coeffs", _strip(int(c) for c in coeffs))

    @classmethod
    def parse(cls, text: str) -> "IntPolynomial":
        """Parse the text format ``"-1,-1,1"`` (= x^2 - x - 1)."""
        text = text.strip()
        if not text:
            return cls(())
        return cls(int(tok) for tok in text.split(","))

    def format(self) -> str:
        return ",".join(str(c) for c in self.coeffs) if self.coeffs else "0"

    @classmethod
    def x(cls) -> "IntPolynomial":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        return IntPolynomial(_padd(self.coeffs, other.coeffs))

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        return IntPolynomial(_padd(self.coeffs, tuple(-c for c in other.coeffs)))

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(-c for c in self.coeffs)

    def __mul__(self, other) -> "IntPolynomial":
        if isinstance(other, int):
            return IntPolynomial(c * other for c in self.coeffs)
        return IntPolynomial(_pmul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "IntPolynomial":
        out = IntPolynomial((1,))
        for _ in range(k):
            out = out * self
        return out

    def shift(self, k: int) -> "IntPolynomial":
        """Multiply by x**k."""
        if not self.coeffs:
            return self
        return IntPolynomial((0,) * k + self.coeffs)

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial(i * c for i, c in enumerate(self.coeffs) if i)

    def content(self) -> int:
        return reduce(gcd, self.coeffs, 0)

    def primitive(self) -> "IntPolynomial":
        """Primitive part with positive leading coefficient."""
        if not self.coeffs:
            return self
        g = self.content()
        if self.coeffs[-1] < 0:
            g = -g
        return IntPolynomial(c // g for c in self.coeffs)

    def l1(self) -> int:
        return sum(abs(c) for c in self.coeffs)

    def to_rational(self) -> "RatPolynomial":
        return RatPolynomial(Fraction(c) for c in self.coeffs)

    def __repr__(self) -> str:
        return f"IntPolynomial({self.format()})"


class SignPolynomial(IntPolynomial):
    """Element of P_d: every coefficient is -1, 0 or +1."""

    def __init__(self, coeffs: Iterable[int] = ()):
        coeffs = tuple(coeffs)
        if any(c not in (-1, 0, 1) for c in coeffs):
            raise ValueError(f"coefficients {coeffs} not in {{-1, 0, 1}}")
        super().__init__(coeffs)

    def __repr__(self) -> str:
        return f"SignPolynomial({self.format()})"


@dataclass(frozen=True)
class RatPolynomial:
    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Iterable = ()):
        object.__setattr__(self, "coeffs", _strip(Fraction(c) for c in coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other) -> "RatPolynomial":
        return RatPolynomial(_padd(self.coeffs, _coeffs(other)))

    def __sub__(self, other) -> "RatPolynomial":
        return RatPolynomial(_padd(self.coeffs, tuple(-c for c in _coeffs(other))))

    def __mul__(self, other) -> "RatPolynomial":
        if isinstance(other, (int, Fraction)):
            return RatPolynomial(c * other for c in self.coeffs)
        return RatPolynomial(_pmul(self.coeffs, _coeffs(other)))

    __rmul__ = __mul__

    def format(self) -> str:
        return ",".join(str(c) for c in self.coeffs) if self.coeffs else "0"

    def __repr__(self) -> str:
        return f"RatPolynomial({self.format()})"


def _coeffs(p) -> tuple:
    return p.coeffs if hasattr(p, "coeffs") else tuple(p)


def _padd(a: Sequence, b: Sequence) -> list:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return out


def _pmul(a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


# ---------------------------------------------------------------------------
# division and gcd


def divmod_rational(a: Sequence, b: Sequence) -> tuple[list, list]:
    """Quotient and remainder over Q; coefficient sequences, constant first."""
    a = [Fraction(c) for c in _strip(a)]
    b = [Fraction(c) for c in _strip(b)]
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    lb = b[-1]
    while len(a) >= len(b) and a:
        k = len(a) - len(b)
        f = a[-1] / lb
        q[k] = f
        for i, c in enumerate(b):
            a[i + k] -= f * c
        a = list(_strip(a))
    return list(_strip(q)), a


def exact_quotient(a: IntPolynomial, b: IntPolynomial) -> IntPolynomial | None:
    """a / b if b divides a in Z[x], else None."""
    q, r = divmod_rational(a.coeffs, b.coeffs)
    if r or any(c.denominator != 1 for c in q):
        return None
    return IntPolynomial(int(c) for c in q)


def divides(d: IntPolynomial, p: IntPolynomial) -> bool:
    if p.is_zero():
        return True
    return exact_quotient(p, d) is not None


def _prem_primitive(a: tuple, b: tuple) -> tuple:
    """Primitive part of the pseudo-remainder of a by b (integer tuples)."""
    a = list(a)
    lb = b[-1]
    db = len(b) - 1
    while len(a) - 1 >= db and a:
        k = len(a) - 1 - db
        la = a[-1]
        a = [c * lb for c in a]
        for i, c in enumerate(b):
            a[i + k] -= la * c
        a = list(_strip(a))
    if not a:
        return ()
    g = reduce(gcd, a, 0)
    return tuple(c // g for c in a)


def gcd_pair(a: IntPolynomial, b: IntPolynomial) -> IntPolynomial:
    """Primitive gcd with positive leading coefficient (primitive PRS)."""
    if a.is_zero():
        return b.primitive()
    if b.is_zero():
        return a.primitive()
    x, y = a.primitive().coeffs, b.primitive().coeffs
    if len(x) < len(y):
        x, y = y, x
    while y:
        x, y = y, _prem_primitive(x, y)
    return IntPolynomial(x).primitive()


def gcd_set(polys: Iterable[IntPolynomial]) -> IntPolynomial:
    """Primitive gcd in Z[x] of a collection with at least one non-zero member."""
    g = IntPolynomial(())
    for p in polys:
        if p.is_zero():
            continue
        g = gcd_pair(g, p) if not g.is_zero() else p.primitive()
        if g.degree == 0:
            break
    if g.is_zero():
        raise AllZero("every polynomial is zero")
    return g


def squarefree_part(p: IntPolynomial) -> IntPolynomial:
    if p.degree <= 0:
        return p.primitive()
    g = gcd_pair(p, p.derivative())
    return exact_quotient(p.primitive(), g).primitive()


def squarefree_decomposition(p: IntPolynomial) -> list[tuple[IntPolynomial, int]]:
    """Yun's algorithm: primitive square-free, pairwise coprime factors with multiplicity.

    Constant factors are dropped; ``p`` equals the product of f**m up to a scalar.
    """
    if p.is_zero():
        raise AllZero("zero polynomial")
    f = p.primitive()
    if f.degree <= 0:
        return []
    fp = f.derivative()
    a0 = gcd_pair(f, fp)
    b = _rat_quotient(f.coeffs, a0)
    c = _rat_quotient(fp.coeffs, a0)
    d = _strip(_padd(list(c), [-x for x in _rderiv(b)]))
    out = []
    i = 1
    while len(b) > 1:
        ai = gcd_pair(IntPolynomial(_primitive_of(b)), IntPolynomial(_primitive_of(d))) \
            if d else IntPolynomial(_primitive_of(b)).primitive()
        if ai.degree > 0:
            out.append((ai, i))
        b = _rat_quotient(b, ai)
        c = _rat_quotient(d, ai) if d else ()
        d = _strip(_padd(list(c), [-x for x in _rderiv(b)]))
        i += 1
    return out


def _rderiv(c: Sequence) -> list:
    return [i * x for i, x in enumerate(c) if i]


def _rat_quotient(a, b: IntPolynomial) -> tuple:
    q, r = divmod_rational(_coeffs(a), b.coeffs)
    if r:
        raise ArithmeticError("inexact division")
    return tuple(q)


def _primitive_of(coeffs: Sequence) -> tuple:
    """Scale a rational coefficient list to a primitive integer tuple (sign kept)."""
    coeffs = _strip(Fraction(c) for c in coeffs)
    if not coeffs:
        return ()
    den = reduce(lambda x, y: x * y // gcd(x, y), (c.denominator for c in coeffs), 1)
    ints = [int(c * den) for c in coeffs]
    g = reduce(gcd, ints, 0)
    return tuple(c // g for c in ints)


# ---------------------------------------------------------------------------


def enumerate_signpolys(d: int, filter: Callable[[SignPolynomial], bool] | None = None,
                        cap: int = ENUMERATION_CAP) -> Iterator[SignPolynomial]:
    """Every element of P_d once, lexicographic in (-1 < 0 < 1), constant term fastest."""
    if d < 0:
        raise ValueError("degree bound must be >= 0")
    if filter is None and 3 ** (d + 1) > cap:
        raise CapExceeded(f"3^{d + 1} polynomials exceed the enumeration cap {cap}")
    for combo in itertools.product((-1, 0, 1), repeat=d + 1):
        p = SignPolynomial(reversed(combo))
        if filter is None or filter(p):
            yield p


def l1_norm(p) -> int:
    return sum(abs(c) for c in _coeffs(p))


def naive_height(q) -> int:
    """Max of |numerator| and denominator over all coefficients."""
    h = 0
    for c in _coeffs(q):
        c = Fraction(c)
        h = max(h, abs(c.numerator), c.denominator)
    return h
