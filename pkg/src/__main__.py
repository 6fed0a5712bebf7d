"""
CLI Entry Point for joyce-pde

Usage:
    python -m src seeds      --seed1 H --seed2 logr      Emit and validate seeds
    python -m src construct  --potential logdet ...      Build a chart and its identity report
    python -m src verify     --input out/chart.json      Residuals and convergence on a chart or CSV
    python -m src invert     --input out/solution.csv    Recover seeds from a solution
    python -m src affine     --F1 l1 --F2 l1*l2          Chern-Terng and seed-route surfaces
    python -m src dual       --potential power:0.25      Legendre duality check
    python -m src version                                Show version and release notes

Configuration is read from ``--config`` (flat key=value text, dotenv syntax,
or a JSON object with the same keys) and then overridden by flags:

    potential=logdet
    joyce_mode=closed-form
    domain=0.0:1.0,1.0:2.0
    grid=65x65
    seed1=H
    seed2=logr
    tol.residual=0.0001

Exit codes: 0 all checks pass, 1 a check failed its tolerance,
2 invalid input or configuration, 3 numerical failure.
"""
import argparse
import sys
from typing import Dict, List, Optional

from dotenv import load_dotenv
from src.utils.logger import logger

# Load environment variables
load_dotenv()

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INTERNAL = 3

# flag dest -> config key
OVERRIDES = {
    "potential": "potential",
    "joyce_mode": "joyce_mode",
    "domain": "domain",
    "grid": "grid",
    "seed1": "seed1",
    "seed2": "seed2",
    "base": "base",
    "F1": "harmonic1",
    "F2": "harmonic2",
    "refine": "refine",
    "xgrid": "xgrid",
    "out": "out",
    "format": "formats",
}


def build_config(args):
    """Config file (or defaults) first, then explicit flags."""
    from src.core.config import RunConfig
    from src.core.errors import ConfigError

    flat: Dict[str, Optional[str]] = (
        RunConfig.load(args.config).to_flat() if args.config else {}
    )
    for dest, key in OVERRIDES.items():
        value = getattr(args, dest, None)
        if value is not None:
            flat[key] = str(value)
    for item in args.tol or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--tol expects name=value, got '{item}'")
        flat[f"tol.{name.strip()}"] = value.strip()
    return RunConfig.from_flat(flat)


def _runner(args):
    from src.orchestration.runner import PipelineRunner

    return PipelineRunner(build_config(args), input_path=args.input, force=args.force)


def _finish(outcome) -> int:
    for path in outcome.files:
        logger.info(f"  wrote {path}")
    if outcome.passed:
        logger.success(f"{outcome.command}: all checks passed")
        return EXIT_OK
    logger.error(f"{outcome.command}: checks failed")
    return EXIT_CHECK_FAILED


def cmd_seeds(args) -> int:
    """Emit and validate the configured seeds."""
    return _finish(_runner(args).run_seeds())


def cmd_construct(args) -> int:
    """Build the chart (x1, x2, u) from two seeds."""
    return _finish(_runner(args).construct())


def cmd_verify(args) -> int:
    """Residuals, convergence and convexity on a chart or an external solution."""
    return _finish(_runner(args).verify())


def cmd_invert(args) -> int:
    """Recover seeds from a solution."""
    return _finish(_runner(args).invert())


def cmd_affine(args) -> int:
    """Affine maximal surfaces through both routes."""
    return _finish(_runner(args).affine())


def cmd_dual(args) -> int:
    """Legendre transform and the dual equation."""
    return _finish(_runner(args).dual())


def cmd_version(args) -> int:
    from src.__version__ import RELEASE_NOTES, __version__

    logger.info(f"joyce-pde {__version__}")
    for version, notes in RELEASE_NOTES.items():
        logger.info(f"  {version}: {notes}")
    return EXIT_OK


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Config file: key=value text or JSON")
    common.add_argument("--out", help="Output directory")
    common.add_argument("--grid", help="Seed grid NxM")
    common.add_argument("--domain", help="Seed domain H0:H1,r0:r1")
    common.add_argument("--potential", help="logdet, power:<alpha>, affine or file:<path>")
    common.add_argument("--joyce-mode", dest="joyce_mode", choices=["closed-form", "quadrature"])
    common.add_argument("--seed1", help="First seed spec (H, logr, pointsource:Hc, mode:k:phase:R0:R0p, expr:name)")
    common.add_argument("--seed2", help="Second seed spec")
    common.add_argument("--base", help="Base point H:r for the integration gauge")
    common.add_argument("--F1", help="First harmonic function (affine)")
    common.add_argument("--F2", help="Second harmonic function (affine)")
    common.add_argument("--refine", type=int, help="Number of x-grid levels for convergence studies")
    common.add_argument("--xgrid", type=int, help="Nodes per side on the coarsest x-grid")
    common.add_argument("--tol", action="append", metavar="NAME=VALUE",
                        help="Tolerance override (closedness, residual, newton, divergence, harmonic)")
    common.add_argument("--format", help="Comma-separated exports: json,csv,obj,svg")
    common.add_argument("--input", help="Chart .json or solution .csv")
    common.add_argument("--force", action="store_true", help="Load a chart even if its potential fingerprint differs")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m src",
        description="Generalized Joyce construction: seeds, charts and verification",
        epilog=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    subparsers = parser.add_subparsers(dest="command", help="Available commands")
    common = _common()

    for name, func, help_text in (
        ("seeds", cmd_seeds, "Emit and validate seeds"),
        ("construct", cmd_construct, "Build a chart and its identity report"),
        ("verify", cmd_verify, "Residuals and convergence on a chart or CSV"),
        ("invert", cmd_invert, "Recover seeds from a solution"),
        ("affine", cmd_affine, "Chern-Terng and seed-route surfaces"),
        ("dual", cmd_dual, "Legendre duality check"),
    ):
        sub = subparsers.add_parser(name, parents=[common], help=help_text)
        sub.set_defaults(func=func)

    version_parser = subparsers.add_parser("version", help="Show version and release notes")
    version_parser.set_defaults(func=cmd_version)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    from src.core.errors import JoyceError

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse usage errors are invalid input
        return 0 if e.code in (0, None) else 2

    if args.command is None:
        parser.print_help()
        return EXIT_OK

    try:
        return args.func(args)
    except JoyceError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except Exception as e:
        logger.exception(f"Unexpected failure in '{args.command}': {e}")
        return EXIT_INTERNAL


run_cli = main


if __name__ == "__main__":
    sys.exit(main())
