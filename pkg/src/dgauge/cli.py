"""Command-line entry point.

Subcommands:

* ``run``      -- execute a scenario and write report.json/.csv/.svg
* ``baseline`` -- print the Monte Carlo unbiased-bias baseline for m
* ``report``   -- regenerate derived outputs from an existing report.json

Exit codes: 0 success, 2 usage/configuration error, 1 runtime failure.
Diagnostics go to stderr; stdout carries results only.  The environment
variable DGAUGE_SEED supplies a default seed (flags win).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import io as dgio
from .core import make_rng
from .errors import ConfigError, FormatError
from .metrics import unbiased_baseline
from .scenarios import SCENARIO_NAMES, ScenarioSpec, run_scenario

log = logging.getLogger("dgauge")

_CONFIG_KEYS = {
    "seed": int,
    "measurements": int,
    "sigma": (int, float),
    "noise_width": int,
    "methods": list,
    "phantom_n": int,
    "voxel_mm": (int, float),
    "baseline_draws": int,
    "out_dir": str,
}


def _load_config(path: str) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    for key, value in doc.items():
        if key not in _CONFIG_KEYS:
            raise ConfigError(
                f"unknown config key {key!r}; valid keys: "
                f"{', '.join(sorted(_CONFIG_KEYS))}"
            )
        expected = _CONFIG_KEYS[key]
        if not isinstance(value, expected) or isinstance(value, bool):
            want = getattr(expected, "__name__", None) or "/".join(
                t.__name__ for t in expected
            )
            raise ConfigError(
                f"config key {key!r} must be {want}, got {type(value).__name__}"
            )
    if "methods" in doc:
        doc["methods"] = tuple(_parse_method_entry(e) for e in doc["methods"])
    return doc


def _parse_method_entry(entry):
    if isinstance(entry, str):
        return entry
    if (
        isinstance(entry, list)
        and len(entry) == 2
        and isinstance(entry[0], str)
        and isinstance(entry[1], dict)
    ):
        return (entry[0], entry[1])
    raise ConfigError(
        f"config method entries must be a name or [name, params], got {entry!r}"
    )


def _default_seed() -> int:
    env = os.environ.get("DGAUGE_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"DGAUGE_SEED must be an integer, got {env!r}") from None


def _cmd_run(args) -> int:
    config = _load_config(args.config) if args.config else {}
    seed = args.seed if args.seed is not None else config.get("seed", _default_seed())
    m = args.measurements if args.measurements is not None else config.get("measurements")
    out_dir = Path(args.out if args.out is not None else config.get("out_dir", "."))
    if args.parallel < 1:
        raise ConfigError(f"--parallel must be >= 1, got {args.parallel}")
    spec = ScenarioSpec(
        name=args.scenario,
        seed=seed,
        m=m,
        sigma=config.get("sigma"),
        noise_width=config.get("noise_width"),
        methods=config.get("methods"),
        phantom_n=config.get("phantom_n", 64),
        voxel_mm=config.get("voxel_mm", 0.8),
        baseline_draws=config.get("baseline_draws", 1_000_000),
        out_dir=out_dir,
    )
    log.info("running scenario %s (seed %d)", spec.name, spec.seed)
    report = run_scenario(spec, workers=args.parallel)
    if report.outcomes:
        dgio.render_summary_svg(report, out_dir / "report.svg")
    for out in report.outcomes:
        log.info(
            "%s: bias=%.4f variance=%.6g error=%.4f",
            out.name, out.summary.bias, out.summary.variance, out.summary.error,
        )

    print(f"scenario: {report.spec.name}  seed: {report.spec.seed}")
    print(f"baseline: {report.baseline:.4f}")
    if report.outcomes:
        print(f"{'method':<16} {'bias':>10} {'variance':>12} {'error':>8} {'skipped':>8}")
        for out in report.outcomes:
            s = out.summary
            print(
                f"{out.name:<16} {s.bias:>10.4f} {s.variance:>12.6g} "
                f"{s.error:>8.4f} {s.skipped_points:>8}"
            )
    if report.quadrants is not None:
        print(f"{'mean':>6} {'variance':>9} {'est.bias':>9} {'est.var':>9} {'mse':>9}")
        for q in report.quadrants:
            print(
                f"{q.mean:>6g} {q.variance:>9g} {q.bias_estimate:>9.4f} "
                f"{q.variance_estimate:>9.4f} {q.mse:>9.4f}"
            )
    print(f"report written to {out_dir / 'report.json'}")
    return 0


def _cmd_baseline(args) -> int:
    if args.measurements < 2:
        raise ConfigError(
            f"--measurements must be >= 2 (standard error is undefined for "
            f"m = {args.measurements})"
        )
    if args.draws < 10_000:
        raise ConfigError(f"--draws must be >= 10000, got {args.draws}")
    value = unbiased_baseline(args.measurements, args.draws, make_rng(args.seed))
    print(f"{value:.4f}")
    return 0


def _cmd_report(args) -> int:
    in_dir = Path(getattr(args, "in"))
    json_path = in_dir / "report.json"
    if not json_path.exists():
        raise ConfigError(f"no report.json in {in_dir}")
    report = dgio.read_report(json_path)
    formats = [args.format] if args.format else ["csv", "svg"]
    for fmt in formats:
        if fmt == "csv":
            paths = dgio.write_report(report, in_dir)
            print(f"wrote {paths['csv']}")
        elif fmt == "svg":
            if not report.outcomes:
                log.warning("report has no methods; skipping SVG")
                continue
            svg_path = in_dir / "report.svg"
            dgio.render_summary_svg(report, svg_path)
            print(f"wrote {svg_path}")
        elif fmt == "md":
            md = dgio.report_markdown(report)
            (in_dir / "report.md").write_text(md)
            print(md, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dgauge",
        description=(
            "Quantify bias, variance, and ground-truth error of denoising "
            "methods on simulated data."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a benchmark scenario")
    p_run.add_argument("--scenario", required=True, choices=SCENARIO_NAMES)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--measurements", type=int, default=None)
    p_run.add_argument("--config", default=None, help="JSON config file")
    p_run.add_argument("--parallel", type=int, default=1, help="worker threads")
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.set_defaults(fn=_cmd_run)

    p_base = sub.add_parser("baseline", help="print the unbiased-bias baseline")
    p_base.add_argument("--measurements", type=int, required=True)
    p_base.add_argument("--draws", type=int, default=1_000_000)
    p_base.add_argument("--seed", type=int, default=0)
    p_base.set_defaults(fn=_cmd_baseline)

    p_rep = sub.add_parser("report", help="regenerate outputs from report.json")
    p_rep.add_argument("--in", required=True, help="directory holding report.json")
    p_rep.add_argument("--format", choices=("csv", "svg", "md"), default=None)
    p_rep.set_defaults(fn=_cmd_report)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO, format="[dgauge] %(message)s"
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (ConfigError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
