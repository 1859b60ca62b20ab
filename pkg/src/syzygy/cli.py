"""Command-line front end.

Exit codes: 0 success, 1 a verification failed, 2 bad usage or input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .combinatorics import enumerate_pairings
from .errors import SyzygyError
from .invariants import ROUTES, load_matrix, principal_invariants
from .symbolic import (
    MAX_EXPANSION_DIM,
    P_BASIS,
    SIGMA_BASIS,
    expand_delta_contraction,
    normalize_ch,
    render,
    to_sigma_basis,
)
from .verify import (
    REL_TOL,
    VerificationReport,
    ch_residual,
    check_delta_vanishes,
    verify_ch_residual,
    verify_expansion_identity,
)


class UsageError(Exception):
    pass


def dimension_cap() -> int:
    """Expansion dimension cap; ``SYZYGY_MAX_DIM`` may raise it (unsupported territory)."""
    raw = os.environ.get("SYZYGY_MAX_DIM")
    if raw is None:
        return MAX_EXPANSION_DIM
    try:
        return max(MAX_EXPANSION_DIM, int(raw))
    except ValueError:
        raise UsageError(f"SYZYGY_MAX_DIM must be an integer, got {raw!r}")


def _check_dim(dim, cap):
    if not 1 <= dim <= cap:
        raise UsageError(f"--dim must be between 1 and {cap}, got {dim}")


def _threads(args):
    return args.threads or os.cpu_count() or 1


def cmd_expand(args, out):
    cap = dimension_cap()
    _check_dim(args.dim, cap)
    poly = expand_delta_contraction(args.dim, cap=cap, threads=_threads(args))
    if args.basis == SIGMA_BASIS:
        poly = to_sigma_basis(poly, args.dim)
    if args.normalize:
        poly = normalize_ch(poly, args.dim)
    print(render(poly, args.format, det_alias=args.det), file=out)
    return 0


def cmd_verify(args, out):
    cap = dimension_cap()
    _check_dim(args.dim, cap)
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    if args.seed < 0:
        raise UsageError("--seed must be non-negative")
    threads = _threads(args)
    expansion = verify_expansion_identity(args.dim, args.trials, args.seed, args.tol, threads, cap=cap)
    residual = verify_ch_residual(args.dim, args.trials, args.seed, args.tol, threads)
    worst = max(expansion.max_relative_residual, residual.max_relative_residual)
    report = VerificationReport(
        "expansion+ch-residual", args.dim, args.trials, worst, expansion.passed and residual.passed, args.seed
    )
    print(report.to_json(), file=out)
    return 0 if report.passed else 1


def _read_matrix(path):
    try:
        with open(path) as fh:
            return load_matrix(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}")


def cmd_invariants(args, out):
    A = _read_matrix(args.matrix_file)
    vec = principal_invariants(A, args.route)
    print(json.dumps({"basis": vec.basis, "route": args.route, "values": list(vec.values)}), file=out)
    return 0


def cmd_pairings(args, out):
    pairings = enumerate_pairings(args.order)
    print(len(pairings), file=out)
    if args.list:
        for pairing in pairings:
            print(pairing, file=out)
    return 0


def cmd_check_delta(args, out):
    report = check_delta_vanishes(args.dim, force=args.force)
    print(report.to_json(), file=out)
    return 0 if report.passed else 1


def cmd_residual(args, out):
    if args.matrix_file:
        print(f"{ch_residual(_read_matrix(args.matrix_file)):.17g}", file=out)
        return 0
    if args.dim is None:
        raise UsageError("residual needs a matrix file or --dim")
    if args.dim < 1 or args.trials < 1 or args.seed < 0:
        raise UsageError("--dim and --trials must be positive and --seed non-negative")
    report = verify_ch_residual(args.dim, args.trials, args.seed, args.tol, _threads(args))
    print(report.to_json(), file=out)
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="syzygy",
        description="Expand and verify Cayley-Hamilton identities from the vanishing generalized Kronecker delta.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", help="symbolic expansion of delta^(m+1) : A^(x)m")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--basis", choices=(P_BASIS, SIGMA_BASIS), default=P_BASIS)
    p.add_argument("--normalize", action="store_true", help="divide out m! to get the monic form")
    p.add_argument("--format", choices=("text", "latex", "json"), default="text")
    p.add_argument("--det", action="store_true", help="write sigma_m as det")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("verify", help="seeded numeric check of the expansion and CH residual")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=REL_TOL)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("invariants", help="principal invariants of a matrix JSON file")
    p.add_argument("matrix_file")
    p.add_argument("--route", choices=ROUTES, default="newton")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("pairings", help="count (and list) Kronecker-delta pairings")
    p.add_argument("order", type=int)
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_pairings)

    p = sub.add_parser("check-delta", help="exhaustive zero check of delta^(m+1) in m dimensions")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--force", action="store_true", help="allow dim 4")
    p.set_defaults(func=cmd_check_delta)

    p = sub.add_parser("residual", help="Cayley-Hamilton residual of a matrix file or random matrices")
    p.add_argument("matrix_file", nargs="?")
    p.add_argument("--dim", type=int)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=REL_TOL)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_residual)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args, out)
    except (UsageError, SyzygyError) as exc:
        print(f"syzygy {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
