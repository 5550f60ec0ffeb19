"""Command-line interface.

Subcommands: ``run`` (simulate a config file), ``preset`` (simulate a
bundled scenario), ``sweep`` (run every config in a directory, in
parallel), ``check`` (validate only). Exit codes: 0 success, 2 validation
failure, 3 envelope violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from pathlib import Path

from . import presets
from .config import load_config
from .errors import EnvelopeViolation, PtzgsError
from .plots import emit_plots
from .runner import run

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_ENVELOPE = 3


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="ptzgs",
        description="Prescribed-time zero-gradient-sum distributed optimization simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate a scenario config file")
    p_run.add_argument("--config", required=True, type=Path)
    p_run.add_argument("--out-dir", type=Path, default=Path("."))
    p_run.add_argument("--no-plots", action="store_true", help="skip figure rendering")

    p_preset = sub.add_parser("preset", help="simulate a bundled scenario")
    p_preset.add_argument("name", choices=presets.preset_names())
    p_preset.add_argument("--algorithm", required=True, choices=["ms", "ss"])
    p_preset.add_argument("--seed", type=int, default=None)
    p_preset.add_argument("--out-dir", type=Path, default=Path("."))
    p_preset.add_argument("--no-plots", action="store_true")

    p_sweep = sub.add_parser("sweep", help="run every *.json config in a directory")
    p_sweep.add_argument("--config-dir", required=True, type=Path)
    p_sweep.add_argument("--out-dir", type=Path, default=Path("sweep-out"))
    p_sweep.add_argument("--jobs", type=int, default=None)

    p_check = sub.add_parser("check", help="validate a config file without running it")
    p_check.add_argument("--config", required=True, type=Path)

    return parser


def _execute(config, out_dir: Path, make_plots=True):
    out_dir.mkdir(parents=True, exist_ok=True)
    result = run(config, csv_path=out_dir / "trajectory.csv")
    report_path = out_dir / "report.json"
    payload = asdict(result.report)
    payload["final_er"] = [float(v) for v in result.report.final_er]
    payload["xstar"] = [float(v) for v in result.xstar]
    report_path.write_text(json.dumps(payload, indent=2) + "\n")
    if make_plots:
        emit_plots(result.trajectory, result.diagnostics, config.schedule, out_dir)
    print(f"[{config.name}] wrote {out_dir / 'trajectory.csv'}")
    print(f"[{config.name}] {result.report.summary()}")
    return EXIT_OK if result.report.envelope_passed else EXIT_ENVELOPE


def _run_one_sweep_job(args):
    cfg_path, out_dir = args
    try:
        config = load_config(cfg_path)
        code = _execute(config, out_dir)
    except PtzgsError as exc:
        print(f"[{Path(cfg_path).stem}] failed: {exc}", file=sys.stderr)
        code = EXIT_ENVELOPE if isinstance(exc, EnvelopeViolation) else EXIT_VALIDATION
    return Path(cfg_path).name, code


def _cmd_run(args):
    config = load_config(args.config)
    return _execute(config, args.out_dir, make_plots=not args.no_plots)


def _cmd_preset(args):
    config = presets.preset_config(args.name, args.algorithm, seed=args.seed)
    return _execute(config, args.out_dir, make_plots=not args.no_plots)


def _cmd_sweep(args):
    cfg_paths = sorted(args.config_dir.glob("*.json"))
    if not cfg_paths:
        print(f"no *.json configs in {args.config_dir}", file=sys.stderr)
        return EXIT_VALIDATION
    jobs = [(p, args.out_dir / p.stem) for p in cfg_paths]
    worst = EXIT_OK
    with ProcessPoolExecutor(max_workers=args.jobs) as pool:
        for name, code in pool.map(_run_one_sweep_job, jobs):
            print(f"sweep: {name} -> exit {code}")
            worst = max(worst, code)
    return worst


def _cmd_check(args):
    config = load_config(args.config)
    print(
        f"OK: {config.name}: variant={config.variant}, {config.n_agents} agents, "
        f"dim={config.dim}, {config.schedule.n_stages} stage(s), "
        f"final deadline t={config.schedule.final_deadline:g} s"
    )
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "preset": _cmd_preset,
        "sweep": _cmd_sweep,
        "check": _cmd_check,
    }
    try:
        return handlers[args.command](args)
    except EnvelopeViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENVELOPE
    except PtzgsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
