"""Command-line interface: ``quadvol <command> [options]``."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .density import DEFAULT_BUDGET, brute_force_density, density
from .errors import InvalidArgument, QuadVolError, ResourceLimitError
from .examples import MAX_SWEEP_BOUND, sweep, verify_examples
from .exactnum import factorize, format_rational, is_prime
from .jordan import jordan_decompose, render
from .lattice import GramMatrix, compact, invariants, parse_gram
from .volume import closed_form_ternary, siegel_volume
from .watson import reduce_to_square_free

EXIT_OK, EXIT_MISMATCH, EXIT_BAD_INPUT, EXIT_RESOURCE = 0, 1, 2, 3
MAX_ABS_DET = 10**12


def _read_lattice(args: argparse.Namespace) -> GramMatrix:
    if args.diag:
        try:
            vals = [int(x) for x in args.diag.split(",")]
        except ValueError as exc:
            raise InvalidArgument(f"--diag expects comma-separated integers: {exc}") from exc
        S = GramMatrix.diag(*vals)
    else:
        try:
            with open(args.gram) as fh:
                S = parse_gram(fh.read())
        except OSError as exc:
            raise InvalidArgument(f"cannot read {args.gram}: {exc}") from exc
    if abs(S.det) > MAX_ABS_DET:
        raise InvalidArgument(f"|det| = {abs(S.det)} exceeds the supported limit {MAX_ABS_DET}")
    return S


def _prime(text: str) -> int:
    try:
        p = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if not is_prime(p):
        raise argparse.ArgumentTypeError(f"{p} is not a prime")
    return p


def _positive(text: str) -> int:
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if k < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return k


def cmd_invariants(args) -> int:
    S = _read_lattice(args)
    inv = invariants(S)
    r, s = inv.signature
    print(f"det: {inv.det}")
    print(f"signature: ({r},{s})")
    print(f"parity: {'even' if inv.is_even else 'odd'}")
    print("hasse: " + " ".join(f"{p}:{e:+d}" for p, e in sorted(inv.hasse.items())))
    return EXIT_OK


def cmd_jordan(args) -> int:
    S = _read_lattice(args)
    print(render(jordan_decompose(S, args.prime)))
    return EXIT_OK


def cmd_density(args) -> int:
    S = _read_lattice(args)
    cf = density(S, args.prime)
    print(f"closed form: {format_rational(cf.value)}")
    if args.oracle is None:
        return EXIT_OK
    o = brute_force_density(S, args.prime, args.oracle, args.budget, args.jobs)
    print(f"oracle (r={o.r}): {format_rational(o.value)}")
    return EXIT_OK if o.value == cf.value else EXIT_MISMATCH


def cmd_reduce(args) -> int:
    S = _read_lattice(args)
    T, steps = reduce_to_square_free(S)
    for st in steps:
        print(st)
    print(f"result: {compact(T)} det {T.det}")
    return EXIT_OK


def cmd_volume(args) -> int:
    S = _read_lattice(args)
    if args.reduce and not factorize(S.det).is_square_free():
        S, steps = reduce_to_square_free(S)
        for st in steps:
            print(st)
        print(f"reduced: {compact(S)}")
    results = {}
    if args.method in ("closed", "both"):
        results["closed form"] = closed_form_ternary(S)
    if args.method in ("siegel", "both"):
        sg = siegel_volume(S, args.gsp, gsp_given=args.gsp_given)
        for w in sg.warnings:
            print(f"warning: {w}", file=sys.stderr)
        results["siegel"] = sg
    for name, res in results.items():
        signs = " ".join(f"{f.p}:{'+' if f.sign > 0 else '-'}" for f in res.per_prime if f.sign is not None)
        print(f"{name}: {format_rational(res.volume)}" + (f"  signs {signs}" if signs else ""))
    vals = {r.volume for r in results.values()}
    return EXIT_OK if len(vals) == 1 else EXIT_MISMATCH


def cmd_verify(args) -> int:
    report = verify_examples()
    print(report.render())
    return EXIT_OK if report.ok else EXIT_MISMATCH


def cmd_sweep(args) -> int:
    if args.bound > MAX_SWEEP_BOUND:
        raise InvalidArgument(f"--bound must be at most {MAX_SWEEP_BOUND}")
    try:
        n = sweep(args.bound, args.out)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    print(f"{n} rows written to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quadvol", description="Local densities and volumes of indefinite ternary lattices."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    lattice = argparse.ArgumentParser(add_help=False)
    src = lattice.add_mutually_exclusive_group(required=True)
    src.add_argument("--gram", metavar="FILE", help="Gram matrix as text (n, then rows) or JSON {\"gram\": ...}")
    src.add_argument("--diag", metavar="A,B,C", help="diagonal Gram matrix")

    sub.add_parser("invariants", parents=[lattice], help="determinant, signature, parity, Hasse symbols")

    p = sub.add_parser("jordan", parents=[lattice], help="p-adic Jordan decomposition")
    p.add_argument("--prime", type=_prime, required=True)

    p = sub.add_parser("density", parents=[lattice], help="local density, optionally checked by enumeration")
    p.add_argument("--prime", type=_prime, required=True)
    p.add_argument("--oracle", type=_positive, metavar="R", help="also count solutions mod p^R")
    p.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET, help="max enumeration size p^(R n^2)")
    p.add_argument("--jobs", type=_positive, default=1)

    sub.add_parser("reduce", parents=[lattice], help="Watson reduction to square-free determinant")

    p = sub.add_parser("volume", parents=[lattice], help="Hirzebruch-Mumford volume (rank 3)")
    p.add_argument("--method", choices=["closed", "siegel", "both"], default="both")
    p.add_argument("--gsp", type=_positive, default=None, help="number of spinor genera (default 1)")
    p.add_argument("--reduce", action="store_true", help="reduce to square-free determinant first")

    sub.add_parser("verify-examples", help="check the worked examples against polygon areas")

    p = sub.add_parser("sweep", help="closed form vs Siegel over diagonal forms, as CSV")
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--out", required=True, metavar="FILE")
    return parser


COMMANDS = {
    "invariants": cmd_invariants,
    "jordan": cmd_jordan,
    "density": cmd_density,
    "reduce": cmd_reduce,
    "volume": cmd_volume,
    "verify-examples": cmd_verify,
    "sweep": cmd_sweep,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_BAD_INPUT
    if getattr(args, "gsp", "unset") != "unset":
        args.gsp_given = args.gsp is not None
        args.gsp = args.gsp or 1
    try:
        return COMMANDS[args.command](args)
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (QuadVolError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
