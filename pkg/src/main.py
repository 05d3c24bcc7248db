#!/usr/bin/env python3
"""
GFMM Mixed-Attribute Toolkit - Command Line Entry Point

Subcommands:
    run             run an experiment grid from a configuration file
    reproduce       re-run the published experiments and compare
    synth           write the synthetic datasets as CSV + schema
    encode-inspect  tabulate train/test encodings of categorical values

Author: GFMM Toolkit Team
Version: 1.0.0
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

# Add src to Python path to ensure imports work correctly
sys.path.insert(0, str(Path(__file__).parent))

from config.experiment import ExperimentConfig, build_config, parse_config_file  # noqa: E402
from config.settings import (APP_CONFIG, CV_CONFIG, ENCODER_CONFIG, LOGGING_CONFIG, PATHS,  # noqa: E402
                             REPRODUCE_CONFIG, SYNTHETIC_DATASETS)
from core.exceptions import GfmmToolkitError  # noqa: E402


def setup_logging(level: str = LOGGING_CONFIG["level"], log_file: str = LOGGING_CONFIG["log_file"]):
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format=LOGGING_CONFIG["format"],
        handlers=[
            logging.FileHandler(log_file),
            logging.StreamHandler()
        ],
        force=True
    )


def _split(value: Optional[str]) -> List[str]:
    return [item.strip() for item in value.split(",") if item.strip()] if value else []


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment configuration file (key = value)")
    common.add_argument("--seed", type=int, help="random seed (overrides the configuration)")
    common.add_argument("--jobs", type=int, help="worker processes for fold evaluation")
    common.add_argument("--out", help="output directory")
    common.add_argument("--log-level", default=LOGGING_CONFIG["level"],
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="logging level")

    parser = argparse.ArgumentParser(prog="gfmm-toolkit", description=APP_CONFIG["app_name"])
    parser.add_argument("--version", action="version", version=f"%(prog)s {APP_CONFIG['version']}")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", parents=[common], help="run an experiment grid")
    run.add_argument("--xlsx", action="store_true", help="also write results.xlsx")
    run.add_argument("--save-models", action="store_true", help="save the first-fold model of every cell")

    reproduce = commands.add_parser("reproduce", parents=[common], help="compare against published results")
    reproduce.add_argument("--datasets", help="comma separated dataset names (default: the configuration's "
                           f"datasets or {','.join(REPRODUCE_CONFIG['small_datasets'])})")
    reproduce.add_argument("--sources", default="encoding,hybrid,mixed,synthetic",
                           help="experiment families to run")
    reproduce.add_argument("--cv-k", type=int, help="folds per repeat")
    reproduce.add_argument("--cv-repeats", type=int, help="cross-validation repeats")
    reproduce.add_argument("--reference", help="published result corpus (CSV)")

    synth = commands.add_parser("synth", parents=[common], help="write synthetic datasets")
    synth.add_argument("--variant", default=",".join(SYNTHETIC_DATASETS), help="synthetic-1 and/or synthetic-2")

    inspect = commands.add_parser("encode-inspect", parents=[common], help="inspect categorical encodings")
    inspect.add_argument("--dataset", default="synthetic-1", help="dataset name")
    inspect.add_argument("--encoders", default=",".join(ENCODER_CONFIG["kinds"]), help="comma separated encoders")
    inspect.add_argument("--rescale", action="store_true", help="show values after rescaling to [0, 1]")
    return parser


def load_config(args: argparse.Namespace) -> Optional[ExperimentConfig]:
    """Configuration file (if any) with the command line overrides applied."""
    if not args.config:
        return None
    config = parse_config_file(args.config)
    return config.with_overrides(seed=args.seed, jobs=args.jobs, output_dir=args.out)


def command_run(args: argparse.Namespace) -> int:
    from core.experiment_runner import run
    from core.report_writer import ReportWriter

    config = load_config(args)
    if config is None:
        raise GfmmToolkitError("'run' needs --config <path>")
    if args.xlsx or args.save_models:
        config = config.with_overrides(report_xlsx=args.xlsx or None, report_save_models=args.save_models or None)
    report = run(config)
    result = ReportWriter(config.output_dir).write(report)
    print(f"{len(report.summary)} grid cell(s), {len(report.folds)} fold result(s), "
          f"{len(report.skipped)} skipped; report in {config.output_dir}")
    for error in result["errors"]:
        print(f"error: {error}")
    return 0 if result["success"] else 1


def command_reproduce(args: argparse.Namespace) -> int:
    from core.reproduction import reproduce_paper_suite

    config = load_config(args)
    if args.datasets:
        datasets = _split(args.datasets)
    elif config is not None:
        datasets = list(config.datasets)
    else:
        datasets = list(REPRODUCE_CONFIG["small_datasets"])
    defaults = config or build_config({"datasets": datasets})
    result = reproduce_paper_suite(
        datasets,
        data_dir=defaults.data_dir,
        schema_dir=defaults.schema_dir,
        output_dir=args.out or str(Path(PATHS["output_dir"]) / "reproduce"),
        seed=args.seed if args.seed is not None else defaults.seed,
        jobs=args.jobs or defaults.jobs,
        cv_k=args.cv_k or defaults.cv_k,
        cv_repeats=args.cv_repeats or defaults.cv_repeats,
        sources=_split(args.sources),
        reference_file=args.reference
    )
    print(f"{len(result.comparison)} published value(s) compared, "
          f"{int(result.comparison['within_tolerance'].sum()) if len(result.comparison) else 0} within tolerance")
    for check in result.checks:
        state = "n/a" if check.passed is None else ("pass" if check.passed else "FAIL")
        suffix = "" if check.asserted else " (reported only)"
        print(f"  [{state}] {check.name}: {check.detail}{suffix}")
    for error in result.errors:
        print(f"error: {error}")
    return 0 if result.success else 1


def command_synth(args: argparse.Namespace) -> int:
    from core.data_loader import save_csv
    from core.synthetic import generate_synthetic

    out = Path(args.out or PATHS["data_dir"])
    seed = args.seed if args.seed is not None else CV_CONFIG["seed"]
    for variant in _split(args.variant):
        if variant not in SYNTHETIC_DATASETS:
            raise GfmmToolkitError(f"unknown synthetic variant '{variant}', expected one of {SYNTHETIC_DATASETS}")
        train, test = generate_synthetic(variant, seed=seed)
        save_csv(train, out / f"{variant}-train.csv")
        save_csv(test, out / f"{variant}-test.csv")
        train.schema.to_file(out / f"{variant}.schema")
        print(f"{variant}: {len(train)} training and {len(test)} testing rows written to {out}")
    return 0


def command_encode_inspect(args: argparse.Namespace) -> int:
    from utils.encoding_inspector import inspect_encoders

    config = load_config(args)
    kwargs = {"data_dir": config.data_dir, "schema_dir": config.schema_dir} if config is not None else {}
    seed = args.seed if args.seed is not None else CV_CONFIG["seed"]
    result = inspect_encoders(args.dataset, _split(args.encoders), output_dir=args.out, seed=seed,
                              rescale=args.rescale, **kwargs)
    if args.out is None:
        print(result["table"].to_string(index=False))
    for path in result["files"]:
        print(f"written {path}")
    return 0


COMMANDS = {
    "run": command_run,
    "reproduce": command_reproduce,
    "synth": command_synth,
    "encode-inspect": command_encode_inspect,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main entry point of the toolkit.

    Returns:
        Process exit status (0 on success, 1 on any error)
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level)
    logger = logging.getLogger(__name__)

    try:
        logger.info(f"Starting {APP_CONFIG['app_name']} {APP_CONFIG['version']}: {args.command}")
        return COMMANDS[args.command](args)

    except GfmmToolkitError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"Error: {e}")
        return 1

    except Exception as e:
        logger.exception(f"Unexpected error in {args.command}: {e}")
        print(f"Unexpected error: {e}")
        print(f"See the log file '{LOGGING_CONFIG['log_file']}' for details")
        return 1


if __name__ == "__main__":
    sys.exit(main())
