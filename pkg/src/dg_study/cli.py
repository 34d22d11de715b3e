"""
CLI - Command-line entry point for convergence studies.

Subcommands:
    converge  run a study described by flags and/or a key=value file
    preset    run one of the pinned published studies
    presets   list the preset names

Exit codes are 0 on success, 1 for invalid configuration or I/O errors and
2 when any study cell blew up.

Version: 1.0 (2025-03-13)
"""
from typing import Any, Dict, List, NoReturn, Optional
import argparse
import logging
import sys

from dg_solver.dg_core import BoundaryMode
from dg_solver.errors import ConfigError
from dg_solver.timestep import SchemeKind
from dg_study.harness import RateTable, StudyConfig, StudyMode, emit_csv, format_table, run_study
from dg_study.presets import PRESETS, get_preset
from dg_study.settings import (
    configure_logging,
    load_key_value_file,
    load_settings,
    parse_number,
    parse_number_list,
)


logger = logging.getLogger("dg_study")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_FAILED_CELLS = 2

# Flags of the converge subcommand that may also appear in a key=value file.
STUDY_KEYS = (
    "problem", "mode", "degrees", "resolutions", "dt", "h", "steps",
    "final-time", "scheme", "bc", "out", "substeps", "workers",
)


class _StudyArgumentParser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with the configuration code."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = _StudyArgumentParser(
        prog="dgconverge",
        description="Run DG convergence studies and print error/rate tables",
    )
    parser.add_argument('--settings', type=str, default=None,
                        help='JSON settings file (see config/default_config.json)')
    parser.add_argument('--debug', action='store_true',
                        help='Enable debug logging')
    sub = parser.add_subparsers(dest="command", required=True)

    converge = sub.add_parser("converge", help="Run a study described by flags")
    converge.add_argument('--config', type=str, default=None,
                          help='key=value file with the same options as the flags')
    converge.add_argument('--problem', choices=["burgers", "bloodflow"], default=None)
    converge.add_argument('--mode', choices=[m.value for m in StudyMode], default=None)
    converge.add_argument('--degrees', type=str, default=None,
                          help='Comma-separated polynomial degrees, e.g. 1,2,3')
    converge.add_argument('--resolutions', type=str, default=None,
                          help='Comma-separated h or dt values, e.g. 1/2,1/4 or 2^-10,2^-11')
    converge.add_argument('--dt', type=str, default=None, help='Fixed time step of a space study')
    converge.add_argument('--h', type=str, default=None, help='Fixed element width of a time study')
    converge.add_argument('--steps', type=str, default=None, help='Step count of a space study')
    converge.add_argument('--final-time', type=str, default=None, help='Final time of a time study')
    converge.add_argument('--scheme', choices=[s.value for s in SchemeKind], default=None)
    converge.add_argument('--bc', choices=[b.value for b in BoundaryMode], default=None)
    converge.add_argument('--substeps', type=str, default=None,
                          help='Forward Euler substeps for the AB2 start')
    converge.add_argument('--workers', type=str, default=None, help='Parallel study cells')
    converge.add_argument('--out', type=str, default=None, help='CSV output path')

    preset = sub.add_parser("preset", help="Run a pinned published study")
    preset.add_argument('name', choices=sorted(PRESETS))
    preset.add_argument('--out', type=str, default=None, help='CSV output path')
    preset.add_argument('--workers', type=str, default=None, help='Parallel study cells')

    sub.add_parser("presets", help="List preset names")
    return parser


def _parse_int(text: str, key: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"Option {key} expects an integer, got {text!r}")


def _parse_enum(enum_type: Any, text: str, key: str) -> Any:
    try:
        return enum_type(text)
    except ValueError:
        choices = ", ".join(e.value for e in enum_type)
        raise ConfigError(f"Option {key} must be one of {choices}, got {text!r}")


def study_options(args: argparse.Namespace) -> Dict[str, str]:
    """Merge the key=value file with the command-line flags; flags win."""
    options: Dict[str, str] = {}
    if args.config:
        options.update(load_key_value_file(args.config))
    unknown = sorted(set(options) - set(STUDY_KEYS))
    if unknown:
        raise ConfigError(f"Unknown option(s) in {args.config}: {', '.join(unknown)}")
    for key in STUDY_KEYS:
        value = getattr(args, key.replace("-", "_"), None)
        if value is not None:
            options[key] = str(value)
    return options


def build_config(options: Dict[str, str], settings: Dict[str, Any]) -> StudyConfig:
    """Turn merged string options into a validated StudyConfig.

    Raises:
        ConfigError: If a required option is missing or a value is invalid
    """
    for key in ("problem", "mode", "degrees", "resolutions"):
        if key not in options:
            raise ConfigError(f"Missing required option --{key}")
    cfg = StudyConfig(
        problem=options["problem"],
        mode=_parse_enum(StudyMode, options["mode"], "mode"),
        degrees=[_parse_int(k.strip(), "degrees") for k in options["degrees"].split(",") if k.strip()],
        resolutions=parse_number_list(options["resolutions"]),
        fixed_dt=parse_number(options["dt"]) if "dt" in options else None,
        num_steps=_parse_int(options["steps"], "steps") if "steps" in options else None,
        fixed_h=parse_number(options["h"]) if "h" in options else None,
        final_time=parse_number(options["final-time"]) if "final-time" in options else None,
        scheme=_parse_enum(SchemeKind, options.get("scheme", "ab2"), "scheme"),
        bc=_parse_enum(BoundaryMode, options.get("bc", "periodic"), "bc"),
        ab2_substeps=_parse_int(options["substeps"], "substeps") if "substeps" in options else None,
        output=options.get("out"),
        workers=_parse_int(options.get("workers", str(settings["study"]["workers"])), "workers"),
        blowup_threshold=float(settings["solver"]["blowup_threshold"]),
        max_start_substeps=int(settings["solver"]["max_start_substeps"]),
    )
    cfg.validate()
    return cfg


def _preset_config(args: argparse.Namespace, settings: Dict[str, Any]) -> StudyConfig:
    cfg = get_preset(args.name)
    cfg.output = args.out
    cfg.workers = _parse_int(args.workers, "workers") if args.workers else int(settings["study"]["workers"])
    cfg.blowup_threshold = float(settings["solver"]["blowup_threshold"])
    cfg.max_start_substeps = int(settings["solver"]["max_start_substeps"])
    return cfg


def _report(table: RateTable, output: Optional[str]) -> int:
    print(format_table(table))
    if output:
        emit_csv(table, output)
        print(f"Wrote {output}")
    if table.failed:
        failures = [row for row in table.rows if row.errors is None]
        logger.error(f"{len(failures)} study cell(s) blew up")
        return EXIT_FAILED_CELLS
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Run the dgconverge command line.

    Args:
        argv: Arguments without the program name, sys.argv[1:] when None

    Returns:
        Process exit code
    """
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_OK
    try:
        settings = load_settings(args.settings)
        configure_logging(settings, args.debug)
        if args.command == "presets":
            for name in sorted(PRESETS):
                print(name)
            return EXIT_OK
        if args.command == "preset":
            cfg = _preset_config(args, settings)
        else:
            cfg = build_config(study_options(args), settings)
        logger.debug(f"Study configuration: {cfg}")
        return _report(run_study(cfg), cfg.output)
    except ConfigError as e:
        logger.error(f"Configuration error: {str(e)}")
        print(f"Error: {str(e)}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        logger.error(f"I/O error: {str(e)}")
        print(f"Error: {str(e)}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
