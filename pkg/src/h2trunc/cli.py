"""Command-line front end.

Every subcommand prints exactly one JSON report on stdout::

    {"schemaVersion": 1, "command": ..., "params": ..., "result": ...,
     "verified": ..., "elapsedMs": ...}

Exit codes: 0 success, 1 a checked property failed or the inputs are
outside an operation's domain, 2 usage or parse errors.  ``params`` holds
the parsed arguments and replays through :func:`params_to_argv`.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import AlgebraError, ParseError
from .rings import Fp, IntZ, Ring, ZmodPE, ratfunc_normalize

SCHEMA_VERSION = 1


class UsageError(Exception):
    """Raised by the parser instead of exiting, so ``main`` owns the exit code."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# argument helpers


def parse_ring(text: str) -> Ring:
    """``Z``, ``F5`` / ``F_5``, or ``Z/5^3``."""
    t = text.replace(" ", "")
    if t == "Z":
        return IntZ()
    m = re.fullmatch(r"F_?(\d+)", t)
    if m:
        return Fp(int(m.group(1)))
    m = re.fullmatch(r"Z/(\d+)\^(\d+)", t)
    if m:
        return ZmodPE(int(m.group(1)), int(m.group(2)))
    raise ParseError(f"unknown ring {text!r}; use Z, F<p> or Z/<p>^<e>")


def parse_rationals(text: str) -> list[Fraction]:
    try:
        return [Fraction(part) for part in text.split(",") if part.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"cannot parse rational list {text!r}") from exc


def parse_ints(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ParseError(f"cannot parse integer list {text!r}") from exc


class _Progress:
    def __init__(self, quiet: bool):
        self.quiet = quiet

    def __call__(self, msg: str) -> None:
        if not self.quiet:
            print(msg, file=sys.stderr, flush=True)


# ---------------------------------------------------------------------------
# subcommand bodies: each returns (result, verified)


def _source_biseries(args):
    from .construction import build_F
    from .series import antisymmetrize, biseries_from_text, reduce_mod

    ring = Fp(args.mod) if args.mod is not None else IntZ()
    if args.source == "explicit-F":
        F = build_F(args.nx, args.ny)
    elif args.source == "antisym-F":
        F = antisymmetrize(build_F(args.nx, args.ny))
    else:
        if not args.terms:
            raise ParseError("--source terms needs --terms")
        F = biseries_from_text(args.terms, IntZ(), args.nx, args.ny)
    return reduce_mod(F, ring) if isinstance(ring, Fp) else F


def cmd_series_eval(args, log):
    from .series import invert_unit, laurent_poly_from_text, mul_trunc, phi_map, series_from_text, series_pow

    ring = parse_ring(args.ring)
    if args.op == "phi":
        if not args.q:
            raise ParseError("--op phi needs --q")
        out = phi_map(laurent_poly_from_text(args.q), args.order)
        return {"order": args.order, "terms": out.to_text()}, True
    if not args.f:
        raise ParseError(f"--op {args.op} needs --f")
    f = series_from_text(args.f, ring, args.order)
    if args.op in ("mul", "add", "sub"):
        if not args.g:
            raise ParseError(f"--op {args.op} needs --g")
        g = series_from_text(args.g, ring, args.order)
        out = {"mul": mul_trunc, "add": lambda a, b: a + b, "sub": lambda a, b: a - b}[args.op](f, g)
        verified = out == mul_trunc(g, f) if args.op == "mul" else True
    elif args.op == "inv":
        out = invert_unit(f)
        verified = mul_trunc(f, out) == type(f).one(ring, args.order)
    else:
        out = series_pow(f, args.k)
        verified = True
    return {"ring": str(ring), "order": args.order, "terms": out.to_text()}, verified


def cmd_rank(args, log):
    from .rank import observed_rank

    F = _source_biseries(args)
    report = observed_rank(F)
    result = report.to_json()
    if args.expect_rank is not None:
        result["expectedRank"] = args.expect_rank
    if args.figure:
        from .plotting import plot_support

        result["figure"] = str(plot_support(F, args.figure, f"support, rank {report.rank}"))
    return result, args.expect_rank is None or report.rank == args.expect_rank


def cmd_decompose(args, log):
    from .rank import finite_rank_decomposition, recompose

    if args.mod is None:
        raise ParseError("decompose needs --mod")
    F = _source_biseries(args)
    pairs = finite_rank_decomposition(F, args.rank)
    back = recompose(pairs, F.ring, F.nx, F.ny) == F
    result = {
        "ring": str(F.ring),
        "Nx": F.nx,
        "Ny": F.ny,
        "pairs": [{"a": a.to_text("x"), "b": b.to_text("y")} for a, b in pairs],
        "multipliesBack": back,
    }
    return result, back


def _sieve_source(args):
    from .sieve import explicit_antisym_mod_p

    return explicit_antisym_mod_p(args.p, args.nx, args.ny), {"kind": "antisym-F", "p": args.p, "nx": args.nx, "ny": args.ny}


def cmd_sieve_find(args, log):
    from .sieve import ORDERING_UNSAFE_D, expected_sieve_offset, find_sieve, pillar_families, verify_sieve

    F, source = _sieve_source(args)
    log(f"scanning offsets for an n={args.n}, d={args.d} sieve mod {args.p}")
    cert = find_sieve(F, args.n, args.d, m_max=args.m_max, D=args.deg, N=args.trunc, source=source)
    result = {
        "certificate": None if cert is None else cert.to_json(),
        "expectedM": expected_sieve_offset(args.p, args.d),
    }
    if args.d in ORDERING_UNSAFE_D:
        result["warning"] = f"d={args.d}: the exponent ordering behind the expected offset does not hold"
    if cert is None:
        return result, False
    result["pillarFamilies"] = pillar_families(F, cert)
    verified = verify_sieve(F, cert)
    if args.expect_m is not None:
        verified = verified and cert.m == args.expect_m
    if args.figure:
        from .plotting import plot_sieve

        result["figure"] = str(plot_sieve(F, cert, args.figure))
    return result, verified


def cmd_sieve_verify(args, log):
    from .construction import build_F
    from .series import antisymmetrize, reduce_mod
    from .sieve import SieveCertificate, verify_sieve

    try:
        obj = json.loads(Path(args.cert).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read certificate {args.cert!r}: {exc}") from exc
    if "result" in obj and isinstance(obj["result"], dict) and "certificate" in obj["result"]:
        obj = obj["result"]["certificate"]
    if not obj:
        raise ParseError("the file holds no certificate")
    cert = SieveCertificate.from_json(obj)
    src = cert.source or {}
    if src.get("kind") != "antisym-F":
        raise ParseError("only certificates on the antisymmetrized explicit series can be rebuilt")
    F = reduce_mod(antisymmetrize(build_F(src["nx"], src["ny"])), Fp(cert.p))
    if args.shift:
        cert = cert.shifted(args.shift)
    ok = verify_sieve(F, cert)
    return {"m": cert.m, "p": cert.p, "valid": ok, "shift": args.shift}, ok


def _ratfunc(text: str, p: int):
    from .series import int_poly_from_text

    if "/" in text:
        num, den = text.split("/", 1)
    else:
        num, den = text, "1"
    return ratfunc_normalize(int_poly_from_text(num.strip("() ")), int_poly_from_text(den.strip("() ")), p)


def cmd_sieve_experiment(args, log):
    from .sieve import sieve_vs_rank_experiment

    alpha, beta = _ratfunc(args.alpha, args.p), _ratfunc(args.beta, args.p)
    trace = sieve_vs_rank_experiment(
        alpha, beta, args.d, args.n, args.rank_h, args.rank_g, args.seed, nx=args.nx, ny=args.ny, D=args.deg
    )
    return trace.to_json(), trace.outcome == "no-sieve-confirmed"


def cmd_powers_indep(args, log):
    from .series import int_poly_from_text
    from .sieve import powers_independent

    U, V = int_poly_from_text(args.u), int_poly_from_text(args.v)
    res = powers_independent(U, V, args.p, args.n, check_rationality=not args.no_rationality_check)
    verified = True
    if args.expect is not None:
        verified = res.independent == (args.expect == "independent")
    return res.to_json(), verified


def cmd_build_f(args, log):
    from .construction import build_F, collision_audit
    from .series import antisymmetrize, reduce_mod

    F = build_F(args.nx, args.ny)
    if args.antisym:
        F = antisymmetrize(F)
    if args.mod is not None:
        F = reduce_mod(F, Fp(args.mod))
    terms = F.terms()
    result = {
        "ring": str(F.ring),
        "Nx": F.nx,
        "Ny": F.ny,
        "termCount": len(terms),
        "collisions": collision_audit(args.nx, args.ny),
        "terms": F.to_text(),
    }
    if args.figure:
        from .plotting import plot_support

        result["figure"] = str(plot_support(F, args.figure, "explicit series support"))
    return result, True


def cmd_divisibility(args, log):
    from .construction import divisibility_witness

    Q = divisibility_witness(args.p, args.nx, args.ny)
    return {"p": args.p, "Nx": args.nx, "Ny": args.ny, "quotientTermCount": len(Q.terms()), "quotient": Q.to_text()}, True


def cmd_specker(args, log):
    from .construction import specker_padic

    _, report = specker_padic(args.p, args.k_cut, args.n, args.precision)
    return report.to_json(), report.ok


def cmd_continuum(args, log):
    from .construction import continuum_differences, continuum_member, isolation_certificate
    from .linalg import rational_dependence
    from .series import LaurentTrunc, reduce_mod

    rs = sorted(parse_rationals(args.r))
    if not rs:
        raise ParseError("--r needs at least one rational")
    members = [continuum_member(r, args.n) for r in rs]
    supports = [set(m.support()) for m in members]
    monotone = all(a <= b for a, b in zip(supports, supports[1:]))
    result = {
        "r": [str(r) for r in rs],
        "N": args.n,
        "members": [m.to_text() for m in members],
        "monotone": monotone,
        "primes": {},
    }
    ok = monotone
    for p in parse_ints(args.primes):
        cert = isolation_certificate(continuum_differences(rs, args.n, p), args.deg + 1)
        fam = [LaurentTrunc.from_series(reduce_mod(m, Fp(p))) for m in members]
        witness = rational_dependence(fam, args.deg, args.n)
        result["primes"][str(p)] = {"isolation": cert.to_json(), "independence": witness.to_json()}
        ok = ok and cert.holds and witness.absent
    return result, ok


def cmd_coinvariants(args, log):
    from .homology import lambda2_coinvariants, phi_functoriality

    pres = lambda2_coinvariants(args.model, args.size)
    result = pres.to_json()
    verified = True
    if args.model == "group":
        result["expectedFreeRank"] = args.size - 1
        verified = pres.free_rank == args.size - 1 and not pres.torsion_factors
        func = phi_functoriality(args.size, args.size)
        result["phiFunctoriality"] = func.to_json()
        verified = verified and func.ok
    return result, verified


def cmd_h2hat(args, log):
    from .homology import h2hat_quotient_presentation

    return h2hat_quotient_presentation(args.n).to_json(), True


def cmd_ce_h2(args, log):
    from .homology import ce_h2

    slice_, cmp = ce_h2(args.n)
    return {"slice": slice_.to_json(), "comparison": cmp}, slice_.complex_ok and cmp["rankIdentity"]


def cmd_acceptance(args, log):
    from .acceptance import current_scale, run_acceptance

    scale = args.scale or current_scale()
    only = set(parse_ints(args.only)) if args.only else None
    results = run_acceptance(scale, only, progress=log)
    return {"scale": scale, "criteria": [r.to_json() for r in results]}, all(r.passed for r in results)


# ---------------------------------------------------------------------------
# parser


def _add_window(p, nx=300, ny=300):
    p.add_argument("--nx", type=int, default=nx, help="x-truncation order")
    p.add_argument("--ny", type=int, default=ny, help="y-truncation order")


def _add_source(p):
    p.add_argument("--source", choices=("explicit-F", "antisym-F", "terms"), default="explicit-F")
    p.add_argument("--terms", help="series in sparse form, e.g. '1*x^2*y + 3*y^4'")
    p.add_argument("--mod", type=int, help="reduce mod this prime (default: work over Z)")
    _add_window(p)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="h2trunc", description="Exact truncated power-series certificates.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--quiet", action="store_true", help="no progress on stderr")

    p = sub.add_parser("series-eval", parents=[common], help="arithmetic on truncated series")
    p.add_argument("--op", choices=("mul", "add", "sub", "inv", "pow", "phi"), required=True)
    p.add_argument("--ring", default="Z", help="Z, F<p> or Z/<p>^<e>")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--f")
    p.add_argument("--g")
    p.add_argument("--k", type=int, default=2, help="exponent for --op pow")
    p.add_argument("--q", help="Laurent polynomial in t for --op phi")
    p.set_defaults(func=cmd_series_eval)

    p = sub.add_parser("rank", parents=[common], help="observed rank of a bivariate series")
    _add_source(p)
    p.add_argument("--expect-rank", type=int)
    p.add_argument("--figure", help="write a support plot to this path")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("decompose", parents=[common], help="explicit finite-rank decomposition mod p")
    _add_source(p)
    p.add_argument("--rank", type=int, required=True)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("sieve-find", parents=[common], help="search an n,d-sieve on the antisymmetrized series")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    _add_window(p)
    p.add_argument("--deg", type=int, default=4, help="degree bound D for pillar independence")
    p.add_argument("--trunc", type=int, help="x-truncation N for pillar independence (default Nx)")
    p.add_argument("--m-max", type=int, help="largest offset searched (default Ny - nd - d - 1)")
    p.add_argument("--expect-m", type=int)
    p.add_argument("--figure", help="write a support plot with the sieve marked")
    p.set_defaults(func=cmd_sieve_find)

    p = sub.add_parser("sieve-verify", parents=[common], help="re-verify a sieve certificate")
    p.add_argument("--cert", required=True, help="certificate JSON or a sieve-find report")
    p.add_argument("--shift", type=int, default=0, help="shift the offset before verifying")
    p.set_defaults(func=cmd_sieve_verify)

    p = sub.add_parser("sieve-experiment", parents=[common], help="build (beta - alpha y)H + G and search a sieve")
    p.add_argument("--p", type=int, default=5)
    p.add_argument("--alpha", default="x")
    p.add_argument("--beta", default="1+x")
    p.add_argument("--d", type=int, default=5)
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--rank-h", type=int, default=4)
    p.add_argument("--rank-g", type=int, default=4)
    p.add_argument("--seed", type=int, default=1)
    _add_window(p, 64, 64)
    p.add_argument("--deg", type=int, default=4)
    p.set_defaults(func=cmd_sieve_experiment)

    p = sub.add_parser("powers-indep", parents=[common], help="independence of U^j V^(n-j) mod p")
    p.add_argument("--u", required=True)
    p.add_argument("--v", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--no-rationality-check", action="store_true")
    p.add_argument("--expect", choices=("independent", "dependent"))
    p.set_defaults(func=cmd_powers_indep)

    p = sub.add_parser("build-f", parents=[common], help="the explicit series with its collision audit")
    _add_window(p, 100, 100)
    p.add_argument("--mod", type=int)
    p.add_argument("--antisym", action="store_true")
    p.add_argument("--figure", help="write a support plot to this path")
    p.set_defaults(func=cmd_build_f)

    p = sub.add_parser("divisibility", parents=[common], help="integral quotient (F - sum g_k h~_k)/p")
    p.add_argument("--p", type=int, required=True)
    _add_window(p)
    p.set_defaults(func=cmd_divisibility)

    p = sub.add_parser("specker", parents=[common], help="p-adic diagonal series checks")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--k-cut", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--precision", type=int)
    p.set_defaults(func=cmd_specker)

    p = sub.add_parser("continuum", parents=[common], help="lacunary family indexed by rationals")
    p.add_argument("--r", default="-1,0,1/2,1", help="comma-separated rationals")
    p.add_argument("--n", type=int, default=4096, help="truncation order")
    p.add_argument("--primes", default="2,3")
    p.add_argument("--deg", type=int, default=3)
    p.set_defaults(func=cmd_continuum)

    p = sub.add_parser("coinvariants", parents=[common], help="exterior-square coinvariants on a window")
    p.add_argument("--model", choices=("group", "completion"), required=True)
    p.add_argument("--size", type=int, required=True)
    p.set_defaults(func=cmd_coinvariants)

    p = sub.add_parser("h2hat-quotient", parents=[common], help="truncated (x+y+xy) quotient")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_h2hat)

    p = sub.add_parser("ce-h2", parents=[common], help="Chevalley-Eilenberg H_2 on a window")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_ce_h2)

    p = sub.add_parser("acceptance", parents=[common], help="run the acceptance suite")
    p.add_argument("--scale", choices=("small", "full"))
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.set_defaults(func=cmd_acceptance)
    return parser


_SKIP_PARAMS = {"command", "func", "quiet"}


def _params(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _SKIP_PARAMS}


def params_to_argv(command: str, params: dict) -> list[str]:
    """Rebuild an argument list that reproduces ``params`` for ``command``."""
    parser = build_parser()
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    sub = subparsers.choices[command]
    argv = [command]
    for action in sub._actions:
        if action.dest not in params or not action.option_strings:
            continue
        value = params[action.dest]
        flag = action.option_strings[0]
        if isinstance(action, argparse._StoreTrueAction):
            if value:
                argv.append(flag)
        elif value is not None:
            argv.append(f"{flag}={value}")  # '=' keeps values like '-1-x' from reading as flags
    return argv


def run(argv: list[str]) -> tuple[dict | None, int, str]:
    """Parse and execute; returns ``(report or None, exit code, stderr message)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return None, 2, f"{exc}\n{parser.format_usage()}"
    log = _Progress(args.quiet)
    t0 = time.perf_counter()
    try:
        result, verified = args.func(args, log)
        error = None
    except ParseError as exc:
        return None, 2, f"{args.command}: {exc}"
    except AlgebraError as exc:
        result, verified = None, False
        error = {"type": type(exc).__name__, "message": str(exc)}
    report = {
        "schemaVersion": SCHEMA_VERSION,
        "command": args.command,
        "params": _params(args),
        "result": result,
        "verified": bool(verified),
        "elapsedMs": int(round((time.perf_counter() - t0) * 1000)),
    }
    if error is not None:
        report["error"] = error
    return report, 0 if verified else 1, "" if error is None else f"{args.command}: {error['type']}: {error['message']}"


def main(argv: list[str] | None = None) -> int:
    report, code, message = run(sys.argv[1:] if argv is None else argv)
    if message:
        print(message, file=sys.stderr)
    if report is not None:
        sys.stdout.write(json.dumps(report, indent=2) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
