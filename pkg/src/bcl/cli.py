"""Command-line front end.  Every command prints one JSON report on stdout.

Exit codes: 0 success, 2 audit failure, 3 precondition error, 4 cap or
precision exhausted, 64 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import os
import re
import shutil
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import (AllZero, CapExceeded, NoRootInRange, NonPositiveArgument, OutOfRange,
                     PreconditionUnmet, UndecidableAtPrecision)
from .measures import SUPPORT_CAP
from .numerics import DEFAULT_PRECISION, IntervalScalar, to_fraction
from .report import SCHEMA, dumps, rational_str

log = logging.getLogger("bcl")

EXIT_OK, EXIT_AUDIT, EXIT_PRECONDITION, EXIT_CAP, EXIT_USAGE = 0, 2, 3, 4, 64

# flags that never influence the report and are left out of the manifest
_VOLATILE = {"threads", "func", "verbose", "command", "which"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# argument parsing helpers


def parse_scale(text: str, n: int | None = None) -> Fraction:
    """A rational, a decimal, ``a^-b``, or the literal ``n^-3n`` style with the level n."""
    text = text.strip().replace(" ", "")
    m = re.fullmatch(r"(\d*)n\^-(\d*)n", text)
    if m:
        if n is None:
            raise UsageError("the scale literal refers to n, but --n is missing")
        coef = int(m.group(1) or 1)
        e = int(m.group(2) or 1)
        return Fraction(1, (coef * n) ** (e * n))
    m = re.fullmatch(r"(\d+)\^(-?\d+)", text)
    if m:
        return Fraction(int(m.group(1))) ** int(m.group(2))
    try:
        return to_fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse scale {text!r}") from exc


def parse_pair(text: str) -> tuple[Fraction, Fraction]:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"expected 'lo,hi', got {text!r}")
    lo, hi = (to_fraction(p) for p in parts)
    if lo > hi:
        raise UsageError("lo > hi")
    return lo, hi


def parse_poly(text: str):
    from .algebra.poly import IntPolynomial
    try:
        return IntPolynomial.parse(text)
    except ValueError as exc:
        raise UsageError(f"cannot parse polynomial {text!r}") from exc


def _algebraic(poly_text: str, iso_text: str):
    from .algebra.roots import AlgebraicNumber
    lo, hi = parse_pair(iso_text)
    try:
        return AlgebraicNumber.from_isolator(parse_poly(poly_text), lo, hi)
    except ValueError as exc:
        raise PreconditionUnmet(str(exc)) from exc


def parameter_from_args(args, prefix: str = "lambda"):
    """Algebraic (minpoly + isolator), interval, or exact rational parameter."""
    get = lambda k: getattr(args, f"{prefix}_{k}", None)  # noqa: E731
    if get("minpoly"):
        if not get("isolator"):
            raise UsageError(f"--{prefix}-minpoly needs --{prefix}-isolator")
        return _algebraic(get("minpoly"), get("isolator"))
    if get("interval"):
        lo, hi = parse_pair(get("interval"))
        if lo == hi:
            return lo
        bits = lo.denominator.bit_length() + hi.denominator.bit_length()
        return IntervalScalar.from_bounds(lo, hi, max(DEFAULT_PRECISION, 4 * bits))
    if get("value") is not None:
        return to_fraction(get("value"))
    raise UsageError(f"a {prefix} parameter is required")


def _env_int(name: str, default: int) -> int:
    v = os.environ.get(name)
    if v is None or v == "":
        return default
    try:
        return int(v)
    except ValueError as exc:
        raise UsageError(f"{name} must be an integer") from exc


def resolve_precision(args) -> int:
    p = args.precision if getattr(args, "precision", None) is not None else _env_int("BCL_PRECISION", DEFAULT_PRECISION)
    if p < 16:
        raise UsageError("precision must be at least 16 bits")
    return p


def resolve_cache_dir(args) -> str | None:
    if getattr(args, "cache_dir", None):
        return args.cache_dir
    return os.environ.get("BCL_CACHE_DIR") or None


def manifest(args, command: list[str], inputs: dict[str, str] | None = None) -> dict:
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in _VOLATILE and v is not None}
    return {
        "command": command,
        "flags": {k: (rational_str(v) if isinstance(v, Fraction) else v) for k, v in flags.items()},
        "seed": flags.get("seed"),
        "precision": flags.get("precision"),
        "tool_version": __version__,
        "input_hashes": inputs or {},
    }


# ---------------------------------------------------------------------------
# commands; each returns (result, passed)


def cmd_entropy(args):
    from .entropy import cond_entropy, entropy_at_scale
    from .measures import bernoulli_level, read_atoms
    prec = resolve_precision(args)
    inputs = {}
    if args.atoms:
        text = Path(args.atoms).read_text()
        mu = read_atoms(text)
        inputs["atoms"] = hashlib.sha256(text.encode()).hexdigest()
    else:
        if args.level is None:
            raise UsageError("either --atoms or a parameter with --level is required")
        mu = bernoulli_level(parameter_from_args(args), args.level)
    r = parse_scale(args.r, args.level)
    methods = ["sweep", "smoothed"] if args.method == "both" else [args.method]
    out = {"atoms": len(mu), "values": {}}
    values = []
    for m in methods:
        if args.r2:
            v = cond_entropy(mu, r, parse_scale(args.r2, args.level), m, prec)
        else:
            v = entropy_at_scale(mu, r, m, prec)
        out["values"][m] = v.to_json()
        values.append(v.value)
    passed = True
    if len(values) == 2:
        a, b = values
        out["methods_agree"] = passed = a.overlaps(b)
    return out, passed, inputs


def _garsia_inputs(args):
    if not (args.minpoly and args.isolator):
        raise UsageError("--minpoly and --isolator are required")
    return parse_poly(args.minpoly), parse_pair(args.isolator)


def cmd_garsia(args):
    from .garsia import garsia_bounds
    f, iso = _garsia_inputs(args)
    rep = garsia_bounds(f, iso, args.n_max, args.schedule, cap=args.support_cap,
                        cache_dir=resolve_cache_dir(args), prec=resolve_precision(args))
    return rep.to_json(), rep.checks["all_hold"], {}


def cmd_dim_bound(args):
    from .garsia import garsia_bounds
    f, iso = _garsia_inputs(args)
    rep = garsia_bounds(f, iso, args.n, "dense" if args.dense else "doubling", cap=args.support_cap,
                        cache_dir=resolve_cache_dir(args), prec=resolve_precision(args))
    best = rep.best
    return {"n": args.n, "best_level": best.n, "h_upper": best.per_step.to_json(),
            "dim_upper": best.dim_bound.to_json(),
            "dim_upper_approx": f"{float(best.dim_bound.hi):.15g}",
            "irreducibility": "caller-asserted; without it the value bounds H_n/(n log2(1/lambda)) only",
            "levels": [lv.to_json() for lv in rep.levels]}, True, {}


def cmd_mahler(args):
    from .algebra.roots import mahler_measure
    p = parse_poly(args.poly)
    if p.is_zero():
        raise NonPositiveArgument("Mahler measure of the zero polynomial")
    eps = to_fraction(args.eps)
    m = mahler_measure(p, eps, resolve_precision(args))
    return {"poly": p.format(), "mahler": m.to_json(), "approx": f"{float(m.mid):.15g}",
            "eps": rational_str(eps)}, True, {}


def cmd_bezout(args):
    from .algebra.bezout import bezout_certificate, divisor_height_ok
    from .algebra.poly import SignPolynomial
    try:
        polys = [SignPolynomial(parse_poly(t).coeffs) for t in args.polys.split(";") if t.strip()]
    except ValueError as exc:
        raise PreconditionUnmet(str(exc)) from exc
    cert = bezout_certificate(polys, args.n)
    checks = cert.verify()
    lemma = divisor_height_ok(cert.gcd, polys, cert.n)
    out = cert.to_json()
    out["checks"] = checks
    out["gcd_l1_within_bound"] = lemma
    return out, cert.is_valid() and lemma is not False, {}


def cmd_approx(args):
    from . import diophantine as dio
    lam = parameter_from_args(args)
    n = args.n
    prec = resolve_precision(args)
    if args.mode == "full-check":
        if not (args.eta_minpoly and args.eta_isolator):
            raise UsageError("full-check needs --eta-minpoly and --eta-isolator")
        eta = _algebraic(args.eta_minpoly, args.eta_isolator)
        rep = dio.full_entropy_check(lam, eta, n, to_fraction(args.c), prec)
        return rep.to_json(), rep.passed, {}
    if args.r is None:
        raise UsageError("--r is required")
    r = parse_scale(args.r, n)
    if args.mode == "collisions":
        cs = dio.collision_search(lam, n, r, to_fraction(args.t), args.policy, prec, args.threads)
        return cs.to_json(with_pairs=args.pairs), cs.certified, {}
    if args.mode == "certificate":
        if args.polys:
            A = [t for t in args.polys.split(";") if t.strip()]
        else:
            A = dio.collision_search(lam, n, r, to_fraction(args.t), "strict", prec,
                                     args.threads).difference_polys
            if not A:
                raise PreconditionUnmet("no collisions at this offset, so no polynomials to certify")
        cert = dio.common_root_certificate(A, lam, n, r, to_fraction(args.c), prec)
        ver = dio.verify_certificate(cert, lam, 2 * prec)
        out = cert.to_json()
        out["verification"] = ver
        return out, cert.valid and ver["all_hold"], {}
    res = dio.dichotomy(lam, n, r, prec, args.threads, to_fraction(args.c))
    return res.to_json(), res.ok, {}


def cmd_audit(args):
    from .algebra.audits import jensen_audit, separation_audit
    if args.which == "separation":
        rep = separation_audit(args.degree, to_fraction(args.pair_threshold), args.threads)
    else:
        rep = jensen_audit(args.degree, args.k_max, args.threads)
    return rep.to_json(), rep.passed, {}


def cmd_props(args):
    from .properties import run_property_suite
    rep = run_property_suite(args.seed, args.cases, args.max_atoms, resolve_precision(args),
                             args.threads, args.witness_dir)
    return rep.to_json(), rep.passed, {}


def cmd_cache(args):
    from .garsia import cache_entries
    cache = resolve_cache_dir(args)
    if not cache:
        raise UsageError("no cache directory (use --cache-dir or BCL_CACHE_DIR)")
    if args.action == "list":
        entries = cache_entries(cache)
        return {"cache_dir": cache, "entries": entries}, not any("error" in e for e in entries), {}
    if args.action == "verify":
        return _verify_cache(cache)
    root = Path(cache) / "garsia"
    removed = len(cache_entries(cache))
    if root.exists():
        shutil.rmtree(root)
    return {"cache_dir": cache, "removed": removed}, True, {}


def _verify_cache(cache: str):
    from .garsia import cache_path, decode_level
    out = []
    ok = True
    for p in sorted((Path(cache) / "garsia").glob("*/level.bin")):
        f, n, den, total, items = decode_level(p.read_bytes())
        good = cache_path(cache, f, n) == p and total == 1 << n and \
            sum(c for _, c in items) == total
        ok &= good
        out.append({"key": p.parent.name, "n": n, "consistent": good})
    return {"cache_dir": cache, "entries": out}, ok, {}


# ---------------------------------------------------------------------------


def _add_parameter(p, prefix: str = "lambda", value: bool = True):
    p.add_argument(f"--{prefix}-minpoly", help="defining polynomial, e.g. -1,1,1")
    p.add_argument(f"--{prefix}-isolator", help="lo,hi holding exactly one real root")
    p.add_argument(f"--{prefix}-interval", help="lo,hi enclosure of a parameter known numerically")
    if value:
        p.add_argument(f"--{prefix}", dest=f"{prefix}_value", help="exact rational parameter")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--threads", type=int, default=1, help="worker processes (output is unaffected)")
    common.add_argument("--precision", type=int, default=None, help="working precision in bits")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = _Parser(prog="bcl", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"bcl {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("entropy", parents=[common], help="entropy at scale H(mu; r) or H(mu; r | r2)")
    p.add_argument("--atoms", help="CSV or JSON atom file")
    _add_parameter(p)
    p.add_argument("--level", type=int, help="use the level-n sign-sum law of the parameter")
    p.add_argument("--r", required=True)
    p.add_argument("--r2")
    p.add_argument("--method", choices=["sweep", "smoothed", "both"], default="sweep")
    p.set_defaults(func=cmd_entropy)

    for name, helptext in (("garsia", "Garsia entropy upper bounds"),
                           ("dim-bound", "dimension upper bound min(H_n/(n log2 1/lambda), 1)")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--minpoly", required=True)
        p.add_argument("--isolator", required=True)
        p.add_argument("--cache-dir")
        p.add_argument("--support-cap", type=int, default=SUPPORT_CAP, help="largest level support")
        if name == "garsia":
            p.add_argument("--n-max", type=int, default=16)
            p.add_argument("--schedule", choices=["doubling", "dense"], default="doubling")
            p.set_defaults(func=cmd_garsia)
        else:
            p.add_argument("--n", type=int, required=True)
            p.add_argument("--dense", action="store_true")
            p.set_defaults(func=cmd_dim_bound)

    p = sub.add_parser("mahler", parents=[common], help="certified Mahler measure")
    p.add_argument("--poly", required=True)
    p.add_argument("--eps", default="1/1000000000000")
    p.set_defaults(func=cmd_mahler)

    p = sub.add_parser("bezout", parents=[common], help="height-controlled Bezout certificate")
    p.add_argument("--polys", required=True, help="';'-separated polynomials in P_n")
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_bezout)

    p = sub.add_parser("approx", parents=[common], help="collisions, certificates and the dichotomy")
    _add_parameter(p)
    _add_parameter(p, "eta", value=False)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", help="scale: rational, a^-b, or n^-3n")
    p.add_argument("--t", default="0", help="bin offset for collisions")
    p.add_argument("--c", default="1/2", help="exponent for the r^c claim")
    p.add_argument("--mode", choices=["collisions", "certificate", "dichotomy", "full-check"],
                   default="dichotomy")
    p.add_argument("--policy", choices=["strict", "inclusive"], default="inclusive")
    p.add_argument("--polys", help="';'-separated polynomials for --mode certificate")
    p.add_argument("--pairs", action="store_true", help="list the colliding sign vectors")
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("audit", parents=[common], help="exhaustive audits over P_n")
    asub = p.add_subparsers(dest="which", required=True, parser_class=_Parser)
    q = asub.add_parser("separation", parents=[common])
    q.add_argument("--degree", type=int, required=True)
    q.add_argument("--pair-threshold", default="1/1000")
    q.set_defaults(func=cmd_audit)
    q = asub.add_parser("jensen", parents=[common])
    q.add_argument("--degree", type=int, required=True)
    q.add_argument("--k-max", type=int, default=6)
    q.set_defaults(func=cmd_audit)

    p = sub.add_parser("props", parents=[common], help="randomised property suite (a)-(h)")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--max-atoms", type=int, default=32)
    p.add_argument("--witness-dir", default=None)
    p.set_defaults(func=cmd_props)

    p = sub.add_parser("cache", parents=[common], help="inspect the Garsia level cache")
    p.add_argument("action", choices=["list", "verify", "clear"])
    p.add_argument("--cache-dir")
    p.set_defaults(func=cmd_cache)
    return ap


_ERROR_CODES = (
    ((CapExceeded, UndecidableAtPrecision), EXIT_CAP),
    ((PreconditionUnmet, NoRootInRange, NonPositiveArgument, OutOfRange, AllZero), EXIT_PRECONDITION),
)


def _emit(obj) -> None:
    sys.stdout.write(dumps(obj) + "\n")
    sys.stdout.flush()


_NEGATIVE_VALUE = re.compile(r"-[\d.]")


def _glue_negative_values(argv: list[str]) -> list[str]:
    """Rewrite ``--poly -1,0,1`` as ``--poly=-1,0,1``; argparse would read it as an option."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if (tok.startswith("--") and "=" not in tok and i + 1 < len(argv)
                and _NEGATIVE_VALUE.match(argv[i + 1])):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    argv = _glue_negative_values(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.precision = resolve_precision(args)
    except UsageError as exc:
        print(f"bcl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    command = [args.command] + ([args.which] if getattr(args, "which", None) else [])
    start = time.perf_counter()
    try:
        result, passed, inputs = args.func(args)
    except UsageError as exc:
        print(f"bcl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # mapped to documented exit codes below
        for types, code in _ERROR_CODES:
            if isinstance(exc, types):
                break
        else:
            if isinstance(exc, (ValueError, FileNotFoundError)):
                code = EXIT_PRECONDITION
            else:
                raise
        print(f"bcl: {type(exc).__name__}: {exc}", file=sys.stderr)
        _emit({"schema": SCHEMA, "manifest": manifest(args, command),
               "error": {"type": type(exc).__name__, "message": str(exc)}})
        return code
    print(f"bcl: wall time {time.perf_counter() - start:.3f} s", file=sys.stderr)
    _emit({"schema": SCHEMA, "manifest": manifest(args, command, inputs), "passed": passed,
           "result": result})
    return EXIT_OK if passed else EXIT_AUDIT


if __name__ == "__main__":
    sys.exit(main())
