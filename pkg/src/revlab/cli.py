"""Command-line entry point: ``revlab run``, ``revlab verify`` and ``revlab model spectrum``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from loguru import logger
from pydantic import ValidationError

from revlab import __version__
from revlab.errors import ManifestError, RevlabError
from revlab.manifest import ModelConfig, load_manifest
from revlab.runner import ExperimentRunner
from revlab.settings import get_settings
from revlab.spectral import CSV_FLOAT_FORMAT, full_spectrum, spectrum_frame, write_csv
from revlab.verify import verify_suite

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_SCHEMA = 2


def configure_logging(level: str | None = None) -> None:
    """Route loguru to stderr at the given or configured level."""
    logger.remove()
    logger.add(sys.stderr, level=(level or get_settings().log_level).upper())


def _load_model_config(path: Path) -> ModelConfig:
    """A bare model document, or the ``model`` block of an experiment manifest."""
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ManifestError(f"cannot read {path}: {e}") from e
    if isinstance(data, dict) and "kind" in data:
        model = load_manifest(path).model
        if model is None:
            raise ManifestError("manifest has no model", key="model")
        return model
    try:
        return ModelConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        raise ManifestError(first["msg"], key=".".join(str(p) for p in first["loc"]) or None) from e


def _run(args: argparse.Namespace) -> int:
    manifest = load_manifest(Path(args.config))
    result = ExperimentRunner(threads=args.threads).run(manifest)
    for artifact in result.artifacts or []:
        print(artifact)
    return EXIT_OK


def _verify(args: argparse.Namespace) -> int:
    report = verify_suite(args.level)
    frame = report.to_frame()
    if args.output:
        write_csv(frame, Path(args.output))
    print(frame.to_string(index=False, float_format=lambda v: f"{v:.3e}"))
    failures = report.failures
    asserted = len(report.asserted)
    print(f"{asserted - len(failures)}/{asserted} checks passed")
    return EXIT_OK if report.passed else EXIT_FAILED


def _spectrum(args: argparse.Namespace) -> int:
    try:
        spec = _load_model_config(Path(args.config)).build()
    except ValidationError as e:
        raise ManifestError(e.errors()[0]["msg"], key="model.params") from e
    frame = spectrum_frame(full_spectrum(spec))
    if args.output:
        print(write_csv(frame, Path(args.output)))
    else:
        frame.to_csv(sys.stdout, index=False, float_format=CSV_FLOAT_FORMAT)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="revlab", description="Local-reversibility numerical laboratory")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help="Override REVLAB_LOG_LEVEL")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run an experiment manifest")
    run.add_argument("config", help="JSON experiment manifest")
    run.add_argument("--threads", type=int, default=None, help="Worker processes (default REVLAB_THREADS)")
    run.set_defaults(handler=_run)

    verify = commands.add_parser("verify", help="Run the verification suite")
    verify.add_argument("--level", choices=["quick", "full"], default="quick")
    verify.add_argument("--output", default=None, help="Also write the check table as CSV")
    verify.set_defaults(handler=_verify)

    model = commands.add_parser("model", help="Model utilities")
    model_commands = model.add_subparsers(dest="model_command", required=True)
    spectrum = model_commands.add_parser("spectrum", help="Full shifted spectrum of a model")
    spectrum.add_argument("config", help="JSON model document or experiment manifest")
    spectrum.add_argument("--output", default=None, help="CSV path (default stdout)")
    spectrum.set_defaults(handler=_spectrum)
    return parser


def main(argv: list[str] | None = None) -> int:
    """Parse arguments, dispatch and map errors to exit codes."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "run" and args.threads is not None and args.threads < 1:
        parser.error("--threads must be at least 1")
    configure_logging(args.log_level)
    try:
        return args.handler(args)
    except ManifestError as e:
        print(f"revlab: manifest error: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    except RevlabError as e:
        print(f"revlab: {e}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
