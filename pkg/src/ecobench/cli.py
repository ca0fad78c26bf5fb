"""Command-line entry point: ``ecobench <stage> [options]``.

Every subcommand runs the pipeline from the raw inputs up to its stage and
writes that stage's outputs. Exit status is 0 on success, 1 for invalid
input or configuration and 2 for numerical failures.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .errors import EcobenchError, NumericalError, StageError
from .networks import PARTNER_RULES
from .pipeline import STAGES, load_config, run_pipeline

COMMANDS = STAGES + ("run",)


def fixture_config() -> Path:
    """Config of the bundled 99-country fixture."""
    return Path(__file__).resolve().parent / "data" / "fixture" / "fixture.cfg"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value run configuration file")
    common.add_argument("--fixture", action="store_true",
                        help="use the bundled 99-country fixture configuration")
    common.add_argument("--out", help="output directory")
    common.add_argument("--exports")
    common.add_argument("--environment")
    common.add_argument("--income-groups")
    common.add_argument("--product-classes")
    common.add_argument("--eci-mode", choices=("compute", "external"))
    common.add_argument("--eci-file", help="external ECI table (implies --eci-mode external)")
    common.add_argument("--threshold", type=float, help="fixed correlation threshold")
    common.add_argument("--target-degree", type=float, help="target average degree")
    common.add_argument("--partner-rule", choices=PARTNER_RULES)
    common.add_argument("--min-rho", type=float)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="ecobench", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "ingest": "align input tables and write the panel",
        "eci": "compute or load ECI",
        "repr": "score countries with DEA",
        "similarity": "correlate non-primary export portfolios",
        "network": "build the similarity network",
        "benchmark": "build the benchmark-partner network",
        "report": "group statistics and improvement potential",
        "run": "full pipeline",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    config_path = fixture_config() if args.fixture and not args.config else args.config
    until = "report" if args.command == "run" else args.command
    try:
        cfg = load_config(
            config_path, validate=False,
            exports=args.exports, environment=args.environment,
            income_groups=args.income_groups, product_classes=args.product_classes,
            eci_mode=args.eci_mode, eci_file=args.eci_file, threshold=args.threshold,
            target_degree=args.target_degree, partner_rule=args.partner_rule,
            min_rho=args.min_rho, output=args.out,
        )
        manifest = run_pipeline(cfg, until=until)
    except EcobenchError as exc:
        cause = exc.cause if isinstance(exc, StageError) else exc
        print(f"ecobench: error: {exc}", file=sys.stderr)
        return 2 if isinstance(cause, NumericalError) else 1
    out = manifest.config["output"]
    counts = manifest.counts
    print(f"{args.command}: wrote {len(manifest.outputs)} files to {out}")
    for key in ("panel", "dropped", "ranked", "similarity", "similarity_edges", "benchmark_edges"):
        if key in counts:
            print(f"  {key}: {counts[key]}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
