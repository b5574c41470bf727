"""Garsia entropy upper bounds h_lambda <= H_n / n and the dimension bound.

For algebraic lambda the level-n law of sum xi_i lambda**i is computed
exactly, merging sign vectors whose sums agree modulo the defining
polynomial.  If that polynomial is a proper multiple of the minimal
polynomial some true collisions are missed, which can only raise H_n, so the
reported numbers stay upper bounds either way.
"""

from __future__ import annotations

import hashlib
import os
import struct
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .algebra.poly import IntPolynomial
from .algebra.roots import AlgebraicNumber
from .errors import BCLError
from .measures import (SUPPORT_CAP, AtomicMeasure, NumberField, _check_parameter,
                       field_level_steps, measure_from_vectors, unpack_level)
from .numerics import DEFAULT_PRECISION, IntervalScalar, entropy_of_counts, log2_interval, to_fraction
from .report import rational_str

MAGIC = b"BCL1"
SLACK = Fraction(1, 1 << 40)


class CacheFormatError(BCLError, ValueError):
    pass


def make_parameter(defining, isolator) -> AlgebraicNumber:
    """The real root of ``defining`` inside ``isolator`` (an interval or a (lo, hi) pair)."""
    if isinstance(defining, str):
        defining = IntPolynomial.parse(defining)
    if isinstance(isolator, IntervalScalar):
        lo, hi = isolator.lo, isolator.hi
    elif isinstance(isolator, str):
        lo, hi = (to_fraction(t) for t in isolator.split(","))
    else:
        lo, hi = (to_fraction(t) for t in isolator)
    lam = AlgebraicNumber.from_isolator(defining, lo, hi)
    _check_parameter(lam)
    return lam


# ---------------------------------------------------------------------------
# cache


def _put_int(buf: bytearray, x: int) -> None:
    n = max(1, (x.bit_length() + 8) // 8)
    buf += struct.pack("<I", n)
    buf += x.to_bytes(n, "little", signed=True)


class _Reader:
    def __init__(self, data: bytes):
        self.data, self.pos = data, 0

    def int(self) -> int:
        if self.pos + 4 > len(self.data):
            raise CacheFormatError("truncated cache file")
        (n,) = struct.unpack_from("<I", self.data, self.pos)
        self.pos += 4
        chunk = self.data[self.pos:self.pos + n]
        if len(chunk) != n:
            raise CacheFormatError("truncated cache file")
        self.pos += n
        return int.from_bytes(chunk, "little", signed=True)


def encode_level(defining: IntPolynomial, n: int, den: int, total: int,
                 items: Iterable[tuple[tuple[int, ...], int]]) -> bytes:
    """BCL1 layout: magic, defining (length then coefficients), n, den, total,
    atom count, then per atom d vector entries and the count."""
    items = list(items)
    buf = bytearray(MAGIC)
    _put_int(buf, len(defining.coeffs))
    for c in defining.coeffs:
        _put_int(buf, c)
    for x in (n, den, total, len(items)):
        _put_int(buf, x)
    for vec, count in items:
        for c in vec:
            _put_int(buf, c)
        _put_int(buf, count)
    return bytes(buf)


def decode_level(data: bytes) -> tuple[IntPolynomial, int, int, int, list[tuple[tuple[int, ...], int]]]:
    if data[:4] != MAGIC:
        raise CacheFormatError("missing BCL1 header")
    rd = _Reader(data)
    rd.pos = 4
    k = rd.int()
    f = IntPolynomial(rd.int() for _ in range(k))
    n, den, total, count = rd.int(), rd.int(), rd.int(), rd.int()
    d = f.degree
    items = []
    for _ in range(count):
        vec = tuple(rd.int() for _ in range(d))
        items.append((vec, rd.int()))
    if rd.pos != len(data):
        raise CacheFormatError("trailing bytes in cache file")
    return f, n, den, total, items


def cache_key(defining: IntPolynomial, n: int) -> str:
    return hashlib.sha256(f"{defining.format()}|{n}".encode()).hexdigest()


def cache_path(cache_dir: str | Path, defining: IntPolynomial, n: int) -> Path:
    return Path(cache_dir) / "garsia" / cache_key(defining, n) / "level.bin"


def write_cache(cache_dir, defining: IntPolynomial, n: int, den: int, total: int, items) -> Path:
    path = cache_path(cache_dir, defining, n)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = encode_level(defining, n, den, total, items)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".level-", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def read_cache(cache_dir, defining: IntPolynomial, n: int):
    """(den, total, items) or None when absent."""
    path = cache_path(cache_dir, defining, n)
    if not path.exists():
        return None
    f, m, den, total, items = decode_level(path.read_bytes())
    if f != defining or m != n:
        raise CacheFormatError(f"cache entry {path} does not match its key")
    return den, total, items


def cache_entries(cache_dir) -> list[dict]:
    root = Path(cache_dir) / "garsia"
    out = []
    if not root.exists():
        return out
    for p in sorted(root.glob("*/level.bin")):
        try:
            f, n, den, total, items = decode_level(p.read_bytes())
            out.append({"key": p.parent.name, "defining": f.format(), "n": n,
                        "atoms": len(items), "bytes": p.stat().st_size})
        except CacheFormatError as exc:
            out.append({"key": p.parent.name, "error": str(exc)})
    return out


# ---------------------------------------------------------------------------


def level_distribution(defining, isolator, n: int, cap: int = SUPPORT_CAP,
                       cache_dir=None) -> AtomicMeasure:
    """Exact law of sum_{i<n} xi_i lambda**i as reduced coefficient vectors."""
    lam = make_parameter(defining, isolator)
    fld = NumberField(lam)
    if n < 1:
        raise ValueError("n must be >= 1")
    if cache_dir is not None:
        hit = read_cache(cache_dir, lam.defining, n)
        if hit is not None:
            den, total, items = hit
            return measure_from_vectors(fld, den, items, total)
    for _, den, base, packed in field_level_steps(fld, n, cap):
        pass
    items = unpack_level(fld, den, base, packed)
    if cache_dir is not None:
        write_cache(cache_dir, lam.defining, n, den, 1 << n, items)
    return measure_from_vectors(fld, den, items, 1 << n)


@dataclass(frozen=True)
class GarsiaLevel:
    n: int
    support: int
    entropy: IntervalScalar
    per_step: IntervalScalar
    dim_bound: IntervalScalar

    def to_json(self) -> dict:
        return {"n": self.n, "support": self.support, "H_n": self.entropy.to_json(),
                "H_n_over_n": self.per_step.to_json(), "dim_bound": self.dim_bound.to_json(),
                "approx": {"H_n": f"{float(self.entropy.mid):.15g}",
                           "H_n_over_n": f"{float(self.per_step.mid):.15g}",
                           "dim_bound": f"{float(self.dim_bound.hi):.15g}"}}


@dataclass
class GarsiaReport:
    parameter: AlgebraicNumber
    levels: list[GarsiaLevel]
    log2_inverse: IntervalScalar
    checks: dict = field(default_factory=dict)

    @property
    def best(self) -> GarsiaLevel:
        return min(self.levels, key=lambda lv: lv.per_step.hi)

    def to_json(self) -> dict:
        return {
            "parameter": self.parameter.to_json(64),
            "semantics": "upper-bound-only",
            "log2_inverse": self.log2_inverse.to_json(),
            "levels": [lv.to_json() for lv in self.levels],
            "h_upper": self.best.per_step.to_json(),
            "dim_upper": self.best.dim_bound.to_json(),
            "checks": self.checks,
        }


def _dim_bound(per_step: IntervalScalar, log_inv: IntervalScalar) -> IntervalScalar:
    q = per_step / log_inv
    one = Fraction(1)
    return IntervalScalar.from_bounds(min(q.lo, one), min(q.hi, one), q.prec)


def schedule_levels(n_max: int, schedule: str = "doubling") -> list[int]:
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if schedule == "dense":
        return list(range(1, n_max + 1))
    if schedule != "doubling":
        raise ValueError(f"unknown schedule {schedule!r}")
    out, n = [], 1
    while n <= n_max:
        out.append(n)
        n *= 2
    return out


def garsia_bounds(defining, isolator, n_max: int, schedule: str = "doubling",
                  cap: int = SUPPORT_CAP, cache_dir=None,
                  prec: int = DEFAULT_PRECISION) -> GarsiaReport:
    """H_n, H_n/n >= h_lambda and min(H_n / (n log2(1/lambda)), 1) on a schedule of n."""
    lam = make_parameter(defining, isolator)
    fld = NumberField(lam)
    wanted = schedule_levels(n_max, schedule)
    found: dict[int, tuple[int, list[int]]] = {}
    if cache_dir is not None:
        for n in wanted:
            hit = read_cache(cache_dir, lam.defining, n)
            if hit is not None:
                den, total, items = hit
                found[n] = (total, [c for _, c in items])
    todo = [n for n in wanted if n not in found]
    if todo:
        last = max(todo)
        for n, den, base, packed in field_level_steps(fld, last, cap):
            if n in todo:
                found[n] = (1 << n, sorted(packed.values()))
                if cache_dir is not None:
                    write_cache(cache_dir, lam.defining, n, den, 1 << n,
                                unpack_level(fld, den, base, packed))
    log_inv = -log2_interval(fld.generator_enclosure(prec))
    levels = []
    for n in wanted:
        total, counts = found[n]
        h = entropy_of_counts(counts, total, prec)
        per = h / n
        levels.append(GarsiaLevel(n, len(counts), h, per, _dim_bound(per, log_inv)))
    rep = GarsiaReport(lam, levels, log_inv)
    rep.checks = subadditivity_checks(levels)
    return rep


def subadditivity_checks(levels: list[GarsiaLevel]) -> dict:
    """H_{m+n} <= H_m + H_n for every computed triple, and H_{2n}/2n <= H_n/n."""
    by_n = {lv.n: lv.entropy for lv in levels}
    pairs = []
    ok = True
    for m in sorted(by_n):
        for n in sorted(by_n):
            if m <= n and m + n in by_n:
                good = by_n[m + n].hi <= by_n[m].lo + by_n[n].lo + SLACK
                ok &= good
                pairs.append({"m": m, "n": n, "holds": good})
    doubling = []
    for n in sorted(by_n):
        if 2 * n in by_n:
            good = by_n[2 * n].hi / (2 * n) <= by_n[n].lo / n + SLACK
            ok &= good
            doubling.append({"n": n, "holds": good})
    return {"subadditive_pairs": pairs, "doubling_monotone": doubling, "all_hold": ok,
            "slack": rational_str(SLACK)}


def dim_bound(defining, isolator, n: int, prec: int = DEFAULT_PRECISION) -> GarsiaLevel:
    rep = garsia_bounds(defining, isolator, n, schedule="doubling", prec=prec)
    lv = [x for x in rep.levels if x.n <= n]
    return lv[-1]
