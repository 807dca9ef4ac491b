"""
Command-line front end

    bicarleman inspect --operator op.json
    bicarleman split   --operator op.json
    bicarleman assign  --operator op.json --imax 2 --ambient-dim 12
    bicarleman kernel  --operator op.json --cap-terms 4
    bicarleman eval    --operator op.json --out grid.csv --grid 64 --deriv 0 0 --deriv 1 0
    bicarleman verify  --operator op.json --seed 7

Exit codes: 0 success, 1 parse or configuration error, 2 infeasible input,
3 verification failure, 4 numerical failure.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .config import PipelineConfig
from .pipeline.exceptions import (
    BiCarlemanError,
    ConfigurationError,
    IndexRangeError,
    InfeasibleError,
    NumericalError,
)
from .pipeline.kernel import truncation_bound
from .pipeline.service import PipelineService
from .pipeline.splitting import null_sequence_sum
from .pipeline.verification import format_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_INFEASIBLE = 2
EXIT_VERIFICATION = 3
EXIT_NUMERICAL = 4


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, NumericalError):
        return EXIT_NUMERICAL
    if isinstance(exc, (InfeasibleError, IndexRangeError)):
        return EXIT_INFEASIBLE
    return EXIT_PARSE


# ============================================================================
# SUBCOMMANDS
# ============================================================================

def _format_values(values) -> str:
    return "[" + ", ".join(f"{v:.6e}" for v in values) + "]"


def run_inspect(service: PipelineService, args: argparse.Namespace) -> int:
    report = service.membership()
    print(f"dim {service.raw_environment.dim}")
    if service.config.ambient_dim is not None:
        print(f"ambient_dim {service.padded_environment.dim}")
    print(f"null_indices {report['null_indices']}")
    print(f"s_norms {_format_values(report['s_norms'])}")
    print(f"s_star_norms {_format_values(report['s_star_norms'])}")
    print(f"member {'yes' if report['member'] else 'no'} tolerance={report['tolerance']:.1e}")
    env = service.environment
    print(f"normalized_null_indices {list(env.null_indices)}")
    print(f"normalized_sum {null_sequence_sum(env):.17g}")
    return EXIT_OK


def run_split(service: PipelineService, args: argparse.Namespace) -> int:
    split = service.split
    for label, system in (("J", split.schmidt_J), ("J_tilde", split.schmidt_J_tilde)):
        print(f"rank_{label} {system.rank}")
        print(f"singular_values_{label} {_format_values(system.positive().singular_values)}")
    root_sum, root_sum_tilde = split.nuclear_sums()
    print(f"root_sum_J {root_sum:.17g}")
    print(f"root_sum_J_tilde {root_sum_tilde:.17g}")
    return EXIT_OK


def run_assign(service: PipelineService, args: argparse.Namespace) -> int:
    assignment = service.assignment
    print(f"slots {list(assignment.slots)}")
    for index, label in sorted(assignment.images.items()):
        print(f"map e{index} -> u{label}")
    report = service.summability()
    for entry in report['orders']:
        parts = " ".join(
            f"{name}={entry[name]['partial_sum']:.6e}/{entry[name]['bound']:.6e}"
            for name in ('h_sum', 'v_sum', 'complement_sum', 'x_sum')
        )
        print(f"order {entry['order']} {parts}")
    for violation in report['violations']:
        print(f"violation {violation}")
    print(f"summability {'OK' if report['ok'] else 'VIOLATED'}")
    return EXIT_OK


def run_kernel(service: PipelineService, args: argparse.Namespace) -> int:
    model = service.model
    print(f"slots {list(model.slots)}")
    for series in (model.P_terms, model.Ptilde_terms, model.F_terms, model.Ftilde_terms):
        print(f"terms {series.name} {len(series)}")
    for name, values in sorted(model.bound_constants.items()):
        print(f"constant {name} {_format_values(values)}")
    print(f"term_cap {model.term_cap}")
    for i in range(model.i_max + 1):
        for j in range(model.i_max + 1):
            print(f"truncation_bound i={i} j={j} {truncation_bound(model, i, j):.6e}")
    return EXIT_OK


def run_eval(service: PipelineService, args: argparse.Namespace) -> int:
    if not args.out:
        raise ConfigurationError("eval requires --out")
    derivatives = [tuple(pair) for pair in args.deriv] if args.deriv else [(0, 0)]
    service.model.check_orders(*(order for pair in derivatives for order in pair))
    rows = service.export_grid(args.out, derivatives)
    print(f"wrote {rows} rows to {args.out}")
    return EXIT_OK


def run_verify(service: PipelineService, args: argparse.Namespace) -> int:
    report = service.verify()
    text = format_report(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK if report['passed'] else EXIT_VERIFICATION


COMMANDS = {
    "inspect": (run_inspect, "Report null-sequence membership and normalisation"),
    "split": (run_split, "Build the split S = Q + E S and its Schmidt data"),
    "assign": (run_assign, "Build the unitary U and the summability report"),
    "kernel": (run_kernel, "Build the kernel series and their truncation bounds"),
    "eval": (run_eval, "Write the kernel grid (and derivatives) as CSV"),
    "verify": (run_verify, "Run the verification harness"),
}


# ============================================================================
# ENTRY POINT
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--operator", required=True, help="Operator document (JSON)")
    common.add_argument("--config", help="Config document (JSON), overridden by the flags below")
    common.add_argument("--out", help="Output path (grid CSV for eval, report for verify)")
    common.add_argument("--imax", type=int, help="Highest derivative order")
    common.add_argument("--grid", type=int, help="Grid points per axis")
    common.add_argument("--extent", type=float, help="Grid half-width")
    common.add_argument("--seed", type=int, help="Verification seed")
    common.add_argument("--cap-terms", dest="cap_terms", type=int, help="Keep only the first N terms of each series")
    common.add_argument("--ambient-dim", dest="ambient_dim", type=int, help="Zero-pad the operator up to this dimension")
    common.add_argument("--enumeration-size", dest="enumeration_size", type=int, help="Minimum number of wavelet labels")
    common.add_argument("--required-x", dest="required_x", type=int, help="Fewest null vectors that must map to g labels")
    common.add_argument(
        "--deriv", nargs=2, type=int, action="append", metavar=("I", "J"),
        help="Derivative pair for eval (repeatable; default 0 0)",
    )
    common.add_argument("--verbose", action="store_true", help="Log pipeline progress")

    parser = argparse.ArgumentParser(prog="bicarleman", description="Smooth bi-Carleman kernel pipeline")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text, description=help_text)
    return parser


def load_config(args: argparse.Namespace) -> PipelineConfig:
    config = PipelineConfig.from_file(args.config) if args.config else PipelineConfig()
    config = config.with_overrides(
        i_max=args.imax,
        grid_points=args.grid,
        grid_extent=args.extent,
        seed=args.seed,
        term_cap=args.cap_terms,
        ambient_dim=args.ambient_dim,
        enumeration_size=args.enumeration_size,
        required_x=args.required_x,
    )
    errors = config.validate()
    if errors:
        raise ConfigurationError("; ".join(errors))
    return config


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    handler, _ = COMMANDS[args.command]
    try:
        service = PipelineService.from_operator_file(args.operator, load_config(args))
        return handler(service, args)
    except (BiCarlemanError, OSError) as exc:
        code = _exit_code(exc)
        logger.debug("Command failed", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
