"""Finitely supported measures, step densities, and the level-n sign-sum laws.

Atoms are exact: rationals, or coefficient vectors reduced modulo the defining
polynomial of an algebraic parameter.  Weights are integer counts over a
common total, so every weight is an exact rational and they sum to one.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

from .algebra.poly import IntPolynomial, gcd_pair, _primitive_of
from .algebra.roots import AlgebraicNumber, sturm_count
from .errors import CapExceeded, UndecidableAtPrecision
from .numerics import (DEFAULT_PRECISION, GUARD_BITS, PRECISION_CAP, IntervalScalar,
                       fixed_entropy, interval_eval_poly, to_fraction, xlogx_fixed)

SUPPORT_CAP = 1 << 22


# ---------------------------------------------------------------------------
# embeddings of non-rational atoms


class NumberField:
    """Q(lambda) for a real algebraic lambda, elements as reduced coefficient vectors.

    Vectors have length d = deg(defining) and represent sum v_i * lambda**i.
    If the defining polynomial is reducible, distinct vectors may still embed
    to the same real number; :meth:`is_zero` detects that exactly.
    """

    def __init__(self, lam: AlgebraicNumber):
        if not lam.real:
            raise ValueError("the generator must be a real algebraic number")
        self.lam = lam
        self.f = lam.defining
        self.d = self.f.degree
        lead = Fraction(self.f.leading)
        self._xd = tuple(-Fraction(c) / lead for c in self.f.coeffs[:-1])
        self._enc: dict[int, IntervalScalar] = {}
        self._refined = lam

    @property
    def key(self) -> tuple:
        return (self.f.coeffs, self.lam.real_lo(), self.lam.real_hi())

    def __eq__(self, other) -> bool:
        return isinstance(other, NumberField) and other.key == self.key

    def __hash__(self) -> int:
        return hash(self.key)

    def zero(self) -> tuple[Fraction, ...]:
        return (Fraction(0),) * self.d

    def rational(self, q) -> tuple[Fraction, ...]:
        return (Fraction(q),) + (Fraction(0),) * (self.d - 1)

    def mul_gen(self, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
        top = v[-1]
        out = [Fraction(0)] + list(v[:-1])
        if top:
            out = [a + top * b for a, b in zip(out, self._xd)]
        return tuple(out)

    def power(self, k: int) -> tuple[Fraction, ...]:
        v = self.rational(1)
        for _ in range(k):
            v = self.mul_gen(v)
        return v

    def reduce(self, coeffs: Sequence) -> tuple[Fraction, ...]:
        """Reduce a polynomial in lambda (constant first) to a vector."""
        acc = self.zero()
        for c in reversed(list(coeffs)):
            acc = self.mul_gen(acc)
            acc = (acc[0] + Fraction(c),) + acc[1:]
        return acc

    def generator_enclosure(self, prec: int) -> IntervalScalar:
        enc = self._enc.get(prec)
        if enc is None:
            self._refined = self._refined.refine(Fraction(1, 1 << (prec + 4)))
            enc = self._refined.isolator(prec + 8)
            self._enc[prec] = enc
        return enc

    def embed(self, v: Sequence[Fraction], prec: int = DEFAULT_PRECISION) -> IntervalScalar:
        """Enclosure of the real number represented by ``v``."""
        x = self.generator_enclosure(prec)
        acc = IntervalScalar.from_value(0, prec)
        for c in reversed(v):
            acc = acc * x + IntervalScalar.from_value(c, prec + 8)
        return acc

    def is_zero(self, v: Sequence[Fraction]) -> bool:
        if not any(v):
            return True
        q = IntPolynomial(_primitive_of(v))
        if q.degree == 0:
            return False
        g = gcd_pair(q, self.f)
        if g.degree == 0:
            return False
        lo, hi = self.lam.real_lo(), self.lam.real_hi()
        if lo == hi:
            return g(lo) == 0
        return sturm_count(g, lo, hi) == 1

    def to_json(self) -> dict:
        return {"defining": self.f.format(), "isolator": self.lam.isolator(64).to_json()}


class IntervalEmbedding:
    """Sign sums at a parameter known only through an interval.

    Atoms are integer coefficient tuples (constant first); equality of two
    atoms can only be refuted, never confirmed, unless the tuples coincide.
    """

    def __init__(self, lam: IntervalScalar, n: int):
        self.lam = lam
        self.d = n

    @property
    def key(self) -> tuple:
        return ("interval", self.lam.lo, self.lam.hi, self.d)

    def __eq__(self, other) -> bool:
        return isinstance(other, IntervalEmbedding) and other.key == self.key

    def __hash__(self) -> int:
        return hash(self.key)

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.d

    def embed(self, v: Sequence[int], prec: int = DEFAULT_PRECISION) -> IntervalScalar:
        return interval_eval_poly(list(v) or [0], self.lam)

    def is_zero(self, v: Sequence[int]) -> bool | None:
        if not any(v):
            return True
        if not self.embed(v).contains(0):
            return False
        return None

    def to_json(self) -> dict:
        return {"interval": self.lam.to_json()}


# ---------------------------------------------------------------------------


class AtomicMeasure:
    """A probability measure with finitely many atoms and weights counts[i]/total.

    Rational measures keep their atoms strictly increasing.  Measures over a
    number field keep a canonical (lexicographic) vector order; the certified
    real order is produced on demand by :meth:`ordered`.
    """

    __slots__ = ("atoms", "counts", "total", "field", "_ordered")

    def __init__(self, atoms: Sequence, counts: Sequence[int], total: int | None = None,
                 field: NumberField | IntervalEmbedding | None = None):
        self.atoms = tuple(atoms)
        self.counts = tuple(int(c) for c in counts)
        self.total = sum(self.counts) if total is None else int(total)
        self.field = field
        self._ordered = None
        if len(self.atoms) != len(self.counts):
            raise ValueError("atoms and counts differ in length")
        if any(c <= 0 for c in self.counts):
            raise ValueError("weights must be positive")
        if sum(self.counts) != self.total:
            raise ValueError("counts do not sum to the total")

    # -- constructors ----------------------------------------------------------

    @classmethod
    def from_counts(cls, counts: Mapping, field=None, total: int | None = None) -> "AtomicMeasure":
        """Canonical measure from {atom: count}; counts are reduced by their gcd."""
        items = [(a, c) for a, c in counts.items() if c]
        if not items:
            raise ValueError("empty measure")
        g = reduce(gcd, (c for _, c in items), 0)
        if total is not None and total % g:
            g = gcd(g, total)
        items.sort(key=lambda t: t[0])
        return cls([a for a, _ in items], [c // g for _, c in items],
                   None if total is None else total // g, field)

    @classmethod
    def from_weights(cls, weights: Mapping | Iterable[tuple]) -> "AtomicMeasure":
        """Rational measure from {position: weight}; weights must sum to 1."""
        pairs = weights.items() if isinstance(weights, Mapping) else weights
        acc: dict[Fraction, Fraction] = defaultdict(Fraction)
        for x, w in pairs:
            acc[to_fraction(x)] += to_fraction(w)
        if sum(acc.values()) != 1:
            raise ValueError("weights do not sum to 1")
        den = reduce(lcm, (w.denominator for w in acc.values()), 1)
        return cls.from_counts({x: int(w * den) for x, w in acc.items()})

    @classmethod
    def delta(cls, c=0) -> "AtomicMeasure":
        return cls([to_fraction(c)], [1])

    @classmethod
    def uniform(cls, atoms: Iterable) -> "AtomicMeasure":
        return cls.from_counts(Counter(to_fraction(a) for a in atoms))

    # -- accessors ---------------------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.field is None

    @property
    def weights(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.total) for c in self.counts)

    def __len__(self) -> int:
        return len(self.atoms)

    def __iter__(self):
        return iter(zip(self.atoms, self.weights))

    def __eq__(self, other) -> bool:
        return (isinstance(other, AtomicMeasure) and self.field == other.field
                and dict(zip(self.atoms, self.weights)) == dict(zip(other.atoms, other.weights)))

    def __hash__(self) -> int:
        return hash((self.atoms, self.weights))

    def __repr__(self) -> str:
        return f"AtomicMeasure({len(self)} atoms, total={self.total})"

    def total_mass(self) -> Fraction:
        return Fraction(sum(self.counts), self.total)

    def positions(self, prec: int = DEFAULT_PRECISION) -> list[IntervalScalar]:
        if self.field is None:
            return [IntervalScalar.from_value(a, prec) for a in self.atoms]
        return [self.field.embed(a, prec) for a in self.atoms]

    def ordered(self, prec: int = DEFAULT_PRECISION, cap: int = PRECISION_CAP) -> "AtomicMeasure":
        """The same measure with atoms in certified increasing real order.

        Atoms that turn out to be equal reals (possible only for a reducible
        defining polynomial) are merged.
        """
        if self.field is None:
            return self
        if self._ordered is not None:
            return self._ordered
        atoms, counts = list(self.atoms), list(self.counts)
        while True:
            enc = [self.field.embed(a, prec) for a in atoms]
            order = sorted(range(len(atoms)), key=lambda i: (enc[i].mid, atoms[i]))
            atoms = [atoms[i] for i in order]
            counts = [counts[i] for i in order]
            enc = [enc[i] for i in order]
            unsettled = False
            i = 0
            while i + 1 < len(atoms):
                if enc[i].certainly_lt(enc[i + 1]):
                    i += 1
                    continue
                diff = tuple(a - b for a, b in zip(atoms[i], atoms[i + 1]))
                z = self.field.is_zero(diff)
                if z:
                    counts[i] += counts[i + 1]
                    del atoms[i + 1], counts[i + 1], enc[i + 1]
                    continue
                unsettled = True
                i += 1
            if not unsettled:
                out = AtomicMeasure(atoms, counts, self.total, self.field)
                out._ordered = out
                self._ordered = out
                return out
            if isinstance(self.field, IntervalEmbedding):
                raise UndecidableAtPrecision("two sign sums cannot be separated at the given interval")
            prec *= 2
            if prec > cap:
                raise UndecidableAtPrecision("atoms could not be ordered at the precision cap")

    # -- io -----------------------------------------------------------------------

    def to_json(self) -> dict:
        from .report import rational_str
        if self.field is None:
            atoms = [rational_str(a) for a in self.atoms]
        else:
            atoms = [[rational_str(c) for c in a] for a in self.atoms]
        out = {"atoms": atoms, "counts": list(self.counts), "total": self.total}
        if self.field is not None:
            out["field"] = self.field.to_json()
        return out


def measure_from_json(obj: Mapping) -> AtomicMeasure:
    """Rational measure from JSON: {"atoms":[...], "counts":[...], "total":T},
    {"atoms":[...], "weights":[...]} or a list of [position, weight] pairs."""
    if isinstance(obj, list):
        return AtomicMeasure.from_weights((to_fraction(str(x)), to_fraction(str(w))) for x, w in obj)
    atoms = [to_fraction(str(a)) for a in obj["atoms"]]
    if "counts" in obj:
        return AtomicMeasure.from_counts(dict(zip(atoms, obj["counts"])), total=obj.get("total"))
    return AtomicMeasure.from_weights(zip(atoms, (to_fraction(str(w)) for w in obj["weights"])))


def read_atoms(text: str) -> AtomicMeasure:
    """Parse the atom file format: CSV lines "position,weight", or JSON."""
    s = text.strip()
    if s.startswith("{") or s.startswith("["):
        return measure_from_json(json.loads(s))
    pairs = []
    for row in csv.reader(io.StringIO(s)):
        if not row or row[0].lstrip().startswith("#"):
            continue
        if len(row) != 2:
            raise ValueError(f"bad atom line: {row}")
        pairs.append((to_fraction(row[0]), to_fraction(row[1])))
    return AtomicMeasure.from_weights(pairs)


def write_atoms(mu: AtomicMeasure) -> str:
    from .report import rational_str
    if mu.field is not None:
        raise TypeError("only rational measures have a CSV form")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for a, p in mu:
        w.writerow([rational_str(a), rational_str(p)])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# level-n laws


def _check_parameter(lam) -> None:
    if isinstance(lam, AlgebraicNumber):
        if not (lam.real and lam.real_lo() >= 0 and lam.real_hi() <= 1):
            lam = lam.refine(Fraction(1, 1 << 32))
        ok = lam.real and 0 < lam.real_lo() and lam.real_hi() < 1
    elif isinstance(lam, IntervalScalar):
        ok = lam.lo > 0 and lam.hi < 1
    else:
        ok = 0 < lam < 1
    if not ok:
        raise ValueError("the parameter must lie in (0, 1), certified")


def bernoulli_level(lam, n: int, cap: int = SUPPORT_CAP) -> AtomicMeasure:
    """Law of sum_{j<n} xi_j lam**j for independent fair signs xi_j.

    Equal sums are merged exactly: in rational arithmetic, by reduction
    modulo the defining polynomial for algebraic ``lam``; for a bare interval
    the 2**n sums must be separable, otherwise UndecidableAtPrecision.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if isinstance(lam, IntervalScalar) and lam.is_point():
        lam = lam.lo
    if isinstance(lam, AlgebraicNumber):
        _check_parameter(lam)
        return field_level(NumberField(lam), n, cap)
    if isinstance(lam, IntervalScalar):
        _check_parameter(lam)
        return _interval_level(lam, n, cap)
    lam = to_fraction(lam)
    _check_parameter(lam)
    if n == 0:
        return AtomicMeasure.delta(0)
    p, q = lam.numerator, lam.denominator
    den = q ** (n - 1)
    dist = {0: 1}
    for j in range(n):
        t = p ** j * q ** (n - 1 - j)
        new: dict[int, int] = defaultdict(int)
        for v, c in dist.items():
            new[v + t] += c
            new[v - t] += c
        if len(new) > cap:
            raise CapExceeded(f"support size {len(new)} exceeds the cap {cap}")
        dist = new
    return AtomicMeasure.from_counts({Fraction(v, den): c for v, c in dist.items()}, total=1 << n)


def _pack_base(vectors: Sequence[Sequence[int]]) -> int:
    bound = max((sum(abs(v[i]) for v in vectors) for i in range(len(vectors[0]))), default=0)
    return 2 * bound + 1


def _pack(v: Sequence[int], base: int) -> int:
    acc = 0
    for c in reversed(v):
        acc = acc * base + c
    return acc


def _unpack(x: int, base: int, d: int) -> tuple[int, ...]:
    out = []
    half = base // 2
    for _ in range(d):
        r = x % base
        if r > half:
            r -= base
        out.append(r)
        x = (x - r) // base
    return tuple(out)


def field_level_steps(field: NumberField, n_max: int, cap: int = SUPPORT_CAP):
    """Yield (n, den, base, packed) after each digit n = 1..n_max.

    ``packed`` maps balanced base-``base`` packed integer vectors to counts;
    the vectors are den * (reduced coefficient vector).  The DP adds one digit
    at a time, so merging is a dictionary lookup.
    """
    powers = []
    v = field.rational(1)
    for _ in range(max(n_max, 1)):
        powers.append(v)
        v = field.mul_gen(v)
    den = reduce(lcm, (c.denominator for p in powers for c in p), 1)
    ints = [tuple(int(c * den) for c in p) for p in powers]
    base = _pack_base(ints)
    dist = {0: 1}
    for n, w in enumerate(ints[:n_max], start=1):
        t = _pack(w, base)
        new: dict[int, int] = defaultdict(int)
        for x, c in dist.items():
            new[x + t] += c
            new[x - t] += c
        if len(new) > cap:
            raise CapExceeded(f"support size {len(new)} exceeds the cap {cap}")
        dist = new
        yield n, den, base, dist


def unpack_level(field: NumberField, den: int, base: int, packed: Mapping[int, int]) -> list[tuple[tuple[int, ...], int]]:
    return sorted((_unpack(x, base, field.d), c) for x, c in packed.items())


def field_level_counts(field: NumberField, n: int, cap: int = SUPPORT_CAP) -> tuple[int, list[tuple[tuple[int, ...], int]]]:
    """(den, [(integer vector, count)]) for the level-n law over ``field``."""
    if n == 0:
        return 1, [((0,) * field.d, 1)]
    for _, den, base, dist in field_level_steps(field, n, cap):
        pass
    return den, unpack_level(field, den, base, dist)


def measure_from_vectors(field: NumberField, den: int, items, total: int) -> AtomicMeasure:
    atoms = [tuple(Fraction(c, den) for c in v) for v, _ in items]
    return AtomicMeasure(atoms, [c for _, c in items], total, field)


def field_level(field: NumberField, n: int, cap: int = SUPPORT_CAP) -> AtomicMeasure:
    den, items = field_level_counts(field, n, cap)
    return measure_from_vectors(field, den, items, 1 << n)


def _interval_level(lam: IntervalScalar, n: int, cap: int) -> AtomicMeasure:
    if (1 << n) > cap:
        raise CapExceeded(f"2^{n} sign vectors exceed the cap {cap}")
    emb = IntervalEmbedding(lam, max(n, 1))
    atoms = []
    for signs in itertools.product((-1, 1), repeat=n):
        atoms.append(tuple(signs) if n else (0,))
    mu = AtomicMeasure(sorted(atoms), [1] * len(atoms), len(atoms), emb)
    return mu.ordered()


# ---------------------------------------------------------------------------
# operations


def convolve(mu: AtomicMeasure, nu: AtomicMeasure, cap: int = SUPPORT_CAP) -> AtomicMeasure:
    """Law of X + Y for independent X ~ mu, Y ~ nu."""
    if mu.field != nu.field:
        raise ValueError("measures live over different fields")
    if len(mu) * len(nu) > cap:
        raise CapExceeded(f"{len(mu)} x {len(nu)} atoms exceed the cap {cap}")
    acc: dict = defaultdict(int)
    if mu.field is None:
        for a, c in zip(mu.atoms, mu.counts):
            for b, e in zip(nu.atoms, nu.counts):
                acc[a + b] += c * e
    else:
        for a, c in zip(mu.atoms, mu.counts):
            for b, e in zip(nu.atoms, nu.counts):
                acc[tuple(x + y for x, y in zip(a, b))] += c * e
    out = AtomicMeasure.from_counts(acc, mu.field, total=mu.total * nu.total)
    return out


def translate(mu: AtomicMeasure, c) -> AtomicMeasure:
    c = to_fraction(c)
    if mu.field is None:
        return AtomicMeasure([a + c for a in mu.atoms], mu.counts, mu.total)
    return AtomicMeasure([(a[0] + c,) + tuple(a[1:]) for a in mu.atoms], mu.counts, mu.total, mu.field)


def rescale(mu: AtomicMeasure, s) -> AtomicMeasure:
    """Push-forward under x -> s*x for a non-zero rational s or an algebraic s.

    An algebraic s must be the generator of the measure's field, or the
    measure must be rational (it is then moved into Q(s)).
    """
    if isinstance(s, AlgebraicNumber):
        field = mu.field if mu.field is not None else NumberField(s)
        if mu.field is not None and not isinstance(field, NumberField):
            raise TypeError("cannot rescale an interval-embedded measure exactly")
        if mu.field is not None and field.f != s.defining:
            raise ValueError("algebraic scale factor must generate the measure's field")
        atoms = [field.mul_gen(a if mu.field is not None else field.rational(a)) for a in mu.atoms]
        out = AtomicMeasure.from_counts(dict(zip(atoms, mu.counts)), field, total=mu.total)
        return out
    s = to_fraction(s)
    if s == 0:
        raise ValueError("scale factor must be non-zero")
    if mu.field is None:
        return AtomicMeasure.from_counts(dict(zip((a * s for a in mu.atoms), mu.counts)), total=mu.total)
    atoms = [tuple(c * s for c in a) for a in mu.atoms]
    return AtomicMeasure.from_counts(dict(zip(atoms, mu.counts)), mu.field, total=mu.total)


def _require_rational(mu: AtomicMeasure) -> None:
    if mu.field is not None:
        raise TypeError("step densities need rational atoms")


@dataclass(frozen=True)
class StepDensity:
    """Piecewise-constant density: value[i] on [breakpoints[i], breakpoints[i+1])."""

    breakpoints: tuple[Fraction, ...]
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.breakpoints) != len(self.values) + 1:
            raise ValueError("need one more breakpoint than values")
        if any(b >= c for b, c in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError("breakpoints must increase strictly")
        if any(v < 0 for v in self.values):
            raise ValueError("density values must be non-negative")

    @classmethod
    def from_jumps(cls, jumps: Mapping[Fraction, Fraction]) -> "StepDensity":
        """Density whose value jumps by ``jumps[x]`` at x (zero to the far left)."""
        xs = sorted(x for x, j in jumps.items() if j)
        bps, vals = [], []
        level = Fraction(0)
        for x in xs:
            level += jumps[x]
            bps.append(x)
            vals.append(level)
        if level != 0:
            raise ValueError("jumps do not return to zero")
        vals.pop()
        # drop zero-length or redundant pieces
        out_b, out_v = [bps[0]], []
        for b, v in zip(bps[1:], vals):
            if out_v and out_v[-1] == v:
                out_b[-1] = b
            else:
                out_v.append(v)
                out_b.append(b)
        return cls(tuple(out_b), tuple(out_v))

    def jumps(self) -> dict[Fraction, Fraction]:
        out: dict[Fraction, Fraction] = {}
        prev = Fraction(0)
        for b, v in zip(self.breakpoints, self.values + (Fraction(0),)):
            out[b] = v - prev
            prev = v
        return out

    def mass(self) -> Fraction:
        return sum((v * (b - a) for a, b, v in zip(self.breakpoints, self.breakpoints[1:], self.values)),
                   Fraction(0))

    def __call__(self, x) -> Fraction:
        x = to_fraction(x)
        for a, b, v in zip(self.breakpoints, self.breakpoints[1:], self.values):
            if a <= x < b:
                return v
        return Fraction(0)

    def differential_entropy(self, prec: int = DEFAULT_PRECISION) -> IntervalScalar:
        """Enclosure of -integral g log2 g, exact apart from one fixed-point rounding.

        With values V_i/Den and lengths l_i/L over common denominators,
        h = log2 Den - (1/(L Den)) sum l_i V_i log2 V_i.
        """
        pieces = [(b - a, v) for a, b, v in zip(self.breakpoints, self.breakpoints[1:], self.values) if v]
        den = reduce(lcm, (v.denominator for _, v in pieces), 1)
        ld = reduce(lcm, (ln.denominator for ln, _ in pieces), 1)
        bits = prec + GUARD_BITS
        s_lo = s_hi = 0
        check = 0
        for ln, v in pieces:
            big_v = int(v * den)
            li = int(ln * ld)
            a, b = xlogx_fixed(big_v, bits)
            s_lo += li * a
            s_hi += li * b
            check += li * big_v
        if check != ld * den:
            raise ValueError("density does not integrate to 1")
        return fixed_entropy(den, s_lo, s_hi, ld, bits, prec)

    def to_json(self) -> dict:
        from .report import rational_str
        return {"breakpoints": [rational_str(b) for b in self.breakpoints],
                "values": [rational_str(v) for v in self.values]}


def smooth(mu: AtomicMeasure, r) -> StepDensity:
    """Density of X + U with U uniform on [0, r] independent of X ~ mu."""
    _require_rational(mu)
    r = to_fraction(r)
    if r <= 0:
        raise ValueError("r must be positive")
    jumps: dict[Fraction, Fraction] = defaultdict(Fraction)
    for a, w in mu:
        jumps[a] += w / r
        jumps[a + r] -= w / r
    return StepDensity.from_jumps(jumps)


def step_convolve(f: StepDensity, mu: AtomicMeasure) -> StepDensity:
    """Density of Y + X for Y with density f and independent X ~ mu."""
    _require_rational(mu)
    base = f.jumps()
    jumps: dict[Fraction, Fraction] = defaultdict(Fraction)
    for a, w in mu:
        for b, j in base.items():
            jumps[a + b] += w * j
    return StepDensity.from_jumps(jumps)


def support_bound(lam, n: int) -> Fraction:
    """(1 - lam**n) / (1 - lam) for a rational parameter."""
    lam = to_fraction(lam)
    return (1 - lam ** n) / (1 - lam)
