"""Command-line entry point: ``twophoton-rabi MODE [options]``.

Exit codes: 0 success, 1 verification failure, 2 usage or parameter error.
"""
from __future__ import annotations

import argparse
import sys

from . import sweep as sw
from .errors import RabiError
from .ode import OdeCoefficients
from .verify import CHECKS

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
COEFFICIENT_NAMES = tuple(OdeCoefficients.__dataclass_fields__)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _branch(text: str):
    if text == "auto":
        return text
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("branch must be 1-4 or 'auto'") from None
    if value not in (1, 2, 3, 4):
        raise argparse.ArgumentTypeError("branch must be 1-4 or 'auto'")
    return value


def _grid(text: str) -> sw.GridRange:
    try:
        return sw.GridRange.parse(text)
    except RabiError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _ladder(text: str) -> tuple:
    try:
        ladder = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("truncation must be comma-separated integers") from None
    if len(ladder) < 2 or min(ladder) < 4:
        raise argparse.ArgumentTypeError("need at least two truncations, each >= 4")
    return ladder


def _fault(text: str) -> tuple[str, float]:
    name, _, amount = text.partition(":")
    if name not in COEFFICIENT_NAMES:
        raise argparse.ArgumentTypeError(f"unknown coefficient {name!r}; one of {COEFFICIENT_NAMES}")
    try:
        return name, float(amount) if amount else 1e-3
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad fault amount {amount!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--omega", type=float, default=1.0)
    common.add_argument("--out", default="-", help="output CSV path, '-' for stdout")

    model = _Parser(add_help=False)
    model.add_argument("--n", type=int, default=0)
    model.add_argument("--epsilon", type=float, default=0.0)
    model.add_argument("--branch", type=_branch, default="auto")
    model.add_argument("--seeds", type=int, default=64)
    model.add_argument("--tol-residual", type=float, default=1e-9)

    parser = _Parser(prog="twophoton-rabi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="mode", required=True)

    p = sub.add_parser("alpha-scan", parents=[common], help="gauge-parameter branches over a ratio grid")
    p.add_argument("--lambda-range", type=_grid, default=sw.GridRange(0.05, 1.0, 96),
                   help="grid of lambda/omega as lo:hi:steps")

    p = sub.add_parser("solve", parents=[common, model], help="all Bethe root sets at one point")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--tol-oracle", type=float, default=1e-6)
    p.add_argument("--truncation", type=_ladder, default=sw.DEFAULT_LADDER)

    p = sub.add_parser("sweep", parents=[common, model], help="energies and constraint curves on a grid")
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--lambda-range", type=_grid, default=sw.GridRange(0.05, 0.45, 40))
    p.add_argument("--epsilon-range", type=_grid, default=sw.GridRange(-1.0, 1.0, 40))
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("verify", parents=[common], help="run the invariant checks")
    p.add_argument("--only", action="append", choices=sorted(CHECKS), default=None)
    p.add_argument("--inject-fault", type=_fault, default=None, metavar="COEFF[:AMOUNT]",
                   help="perturb one transformed-operator coefficient in the exactness and solver checks")

    p = sub.add_parser("oracle", parents=[common], help="truncated Fock-space spectrum")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--energy", type=float, default=None)
    p.add_argument("--levels", type=int, default=10)
    p.add_argument("--tol-oracle", type=float, default=1e-6)
    p.add_argument("--truncation", type=_ladder, default=sw.DEFAULT_LADDER)
    return parser


def spec_from_args(args: argparse.Namespace) -> sw.SweepSpec:
    def get(name, default=None):
        return getattr(args, name, default)

    return sw.SweepSpec(
        mode=args.mode, n=get("n", 0), omega=args.omega, lam=get("lam"),
        epsilon=get("epsilon", 0.0), delta=get("delta"), branch=get("branch", "auto"),
        lambda_range=get("lambda_range"), epsilon_range=get("epsilon_range"),
        tolerances={"residual": get("tol_residual", 1e-9), "oracle": get("tol_oracle", 1e-6)},
        seeds=get("seeds", 64), truncation=get("truncation", sw.DEFAULT_LADDER),
        workers=get("workers", 1), output=args.out, only=get("only"), fault=get("inject_fault"),
        energy=get("energy"), levels=get("levels", 10))


def run(spec: sw.SweepSpec) -> int:
    ok, table = sw.run_spec(spec)
    table.write(spec.output)
    return EXIT_OK if ok else EXIT_FAIL


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return run(spec_from_args(args))
    except (UsageError, RabiError, ValueError, ZeroDivisionError, ArithmeticError) as exc:
        print(f"twophoton-rabi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
