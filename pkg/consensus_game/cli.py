"""
Command-line interface
simulate, analyze and sweep subcommands; errors are printed as structured JSON on stderr
"""
import argparse
import logging
import sys
from typing import List, Optional

from .analysis import build_report
from .engine import trajectory_columns
from .error_handler import ErrorHandler
from .file_storage import get_output_manager
from .models import ScenarioConfig, SweepSpec
from .scenarios import get_available_scenarios, get_scenario
from .settings import configure_logging
from .sweep import run_sweep, sample_initial_states


logger = logging.getLogger(__name__)


def load_scenario(args: argparse.Namespace) -> ScenarioConfig:
    """
    Scenario from --config or --preset, with --seed redrawing x0 on [-1, 1]

    Raises:
        ConfigValidationError: If the configuration is invalid
        OSError: If the config file cannot be read
    """
    if args.preset:
        scenario = get_scenario(args.preset)
    else:
        scenario = ScenarioConfig.from_file(args.config)
    if getattr(args, "seed", None) is not None:
        x0 = sample_initial_states(scenario.graph.n, 1, args.seed)[0]
        scenario = scenario.with_overrides({"x0": [float(v) for v in x0]})
        logger.info(f"Initial states drawn with seed {args.seed}")
    return scenario


def cmd_simulate(args: argparse.Namespace) -> int:
    """Run one scenario and write trajectory.csv and summary.json"""
    from .engine import run

    scenario = load_scenario(args)
    result = run(scenario)
    output = get_output_manager(args.out)
    with output.stage() as staged:
        staged.write_csv("trajectory.csv", trajectory_columns(scenario.graph.n), result.trajectory_rows())
        staged.write_json("summary.json", result.summary())
    return ErrorHandler.EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    """Print the closed-form condition report as JSON"""
    report = build_report(load_scenario(args))
    print(report.model_dump_json(indent=2))
    return ErrorHandler.EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    """Run a sweep and write sweep.csv and sweep_summary.json"""
    spec = SweepSpec.from_file(args.config)
    result = run_sweep(spec, workers=args.workers, seed=args.seed)
    output = get_output_manager(args.out)
    with output.stage() as staged:
        staged.write_csv("sweep.csv", result.columns, result.rows)
        staged.write_json("sweep_summary.json", result.summary)
    failed = result.summary["errors"]["total_errors"]
    if failed:
        logger.warning(f"{failed} of {len(result.rows)} sweep points failed")
    return ErrorHandler.EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="consensus-game",
        description="Rolling-horizon attack/recovery games on consensus networks",
    )
    parser.add_argument("--quiet", action="store_true", help="Only log warnings and errors")
    subparsers = parser.add_subparsers(dest="command", required=True)

    simulate = subparsers.add_parser("simulate", help="Simulate one scenario")
    source = simulate.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", type=str, help="Scenario JSON file")
    source.add_argument("--preset", choices=get_available_scenarios(), help="Named scenario")
    simulate.add_argument("--out", type=str, default=None, help="Output directory")
    simulate.add_argument("--seed", type=int, default=None, help="Draw x0 uniformly on [-1, 1] with this seed")
    simulate.set_defaults(handler=cmd_simulate)

    analyze = subparsers.add_parser("analyze", help="Print consensus conditions and cluster bounds")
    source = analyze.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", type=str, help="Scenario JSON file")
    source.add_argument("--preset", choices=get_available_scenarios(), help="Named scenario")
    analyze.set_defaults(handler=cmd_analyze)

    sweep = subparsers.add_parser("sweep", help="Run a parameter sweep")
    sweep.add_argument("--config", type=str, required=True, help="Sweep JSON file")
    sweep.add_argument("--out", type=str, default=None, help="Output directory")
    sweep.add_argument("--seed", type=int, default=None, help="Override the x0 sampling seed")
    sweep.add_argument("--workers", type=int, default=None, help="Worker processes")
    sweep.set_defaults(handler=cmd_sweep)

    for sub in (simulate, analyze, sweep):
        sub.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS,
                         help="Only log warnings and errors")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Entry point

    Returns:
        Process exit code
    """
    args = build_parser().parse_args(argv)
    configure_logging(quiet=args.quiet)
    try:
        return args.handler(args)
    except Exception as e:
        detail = ErrorHandler.handle_exception(e)
        ErrorHandler.log_error(args.command, detail, {"config": getattr(args, "config", None)})
        print(detail.model_dump_json(indent=2), file=sys.stderr)
        return detail.exit_code


if __name__ == "__main__":
    sys.exit(main())
