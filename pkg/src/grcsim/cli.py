"""Command-line front end: ``grcsim run`` and ``grcsim compare``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import math
import os
import sys
from pathlib import Path

from . import __version__
from .config import PRESETS, load_preset, parse_config
from .kvfile import ConfigError
from .sim import run_closed_loop

TELEMETRY_FILE = "telemetry.csv"
METRICS_FILE = "metrics.txt"
GNUPLOT_FILE = "plot.gp"

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED = 0, 1, 2

COMPARE_KEYS = ("rmse_position", "rmse_velocity", "max_abs_error", "settling_time",
                "control_saturation_fraction", "final_error")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def format_metrics(config, telemetry, metrics) -> str:
    rows = {
        "name": config.name,
        "family": config.family.value,
        "controller": config.controller,
        "tracked": config.tracked,
        "seed": config.seed,
        "n_subsystems": telemetry.n_subsystems,
        "ticks": len(telemetry),
        "diverged_at": telemetry.diverged_at if telemetry.diverged else "none",
        "pressure_clip_ticks": telemetry.flags.get("pressure_clip_ticks", 0),
    }
    rows.update(metrics.as_dict())
    return "".join(f"{k} = {_fmt(v)}\n" for k, v in rows.items())


def read_metrics(path: Path) -> dict[str, str]:
    out = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        if "=" in line:
            k, v = (s.strip() for s in line.split("=", 1))
            out[k] = v
    return out


def gnuplot_script(csv_name: str, tracked: str) -> str:
    col = 3 if tracked == "velocity" else 2
    ref = col + 4
    return (
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        "set xlabel 't [s]'\n"
        "set multiplot layout 2,1\n"
        f"plot '{csv_name}' using 1:{col} with lines, '' using 1:{ref} with lines\n"
        f"plot '{csv_name}' using 1:10 with lines\n"
        "unset multiplot\n"
    )


def _load(args):
    if args.config:
        config = parse_config(args.config)
    else:
        config = load_preset(args.preset)
        config = dataclasses.replace(config, name=args.preset)
    changes = {}
    if args.controller:
        changes["controller"] = args.controller
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.duration is not None:
        changes["duration"] = args.duration
    if changes:
        try:
            config = dataclasses.replace(config, **changes)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    return config


def run_command(args) -> int:
    try:
        config = _load(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out or os.environ.get("GRC_SIM_OUT") or "runs/latest")
    out.mkdir(parents=True, exist_ok=True)
    telemetry, metrics = run_closed_loop(config)
    write_all = not (args.csv or args.metrics)
    if args.csv or write_all:
        telemetry.write_csv(out / TELEMETRY_FILE)
    if args.metrics or write_all:
        with open(out / METRICS_FILE, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(format_metrics(config, telemetry, metrics))
    if args.gnuplot:
        with open(out / GNUPLOT_FILE, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(gnuplot_script(TELEMETRY_FILE, config.tracked))
    if telemetry.diverged:
        print(f"run diverged at tick {telemetry.diverged_at}; partial output in {out}", file=sys.stderr)
        return EXIT_DIVERGED
    key = "rmse_velocity" if config.tracked == "velocity" else "rmse_position"
    print(f"{config.name} [{config.controller}] {key} = {getattr(metrics, key):.6g} -> {out}")
    return EXIT_OK


def _num(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        return math.nan


def _ratio(num: float, den: float) -> float:
    if num == den:
        return 1.0
    if den == 0:
        return math.inf
    return num / den


def compare_command(args) -> int:
    runs = []
    for d in (args.first, args.second):
        path = Path(d) / METRICS_FILE
        if not path.is_file():
            print(f"error: {path} not found (is {d} a completed run directory?)", file=sys.stderr)
            return EXIT_CONFIG
        runs.append(read_metrics(path))
    a, b = runs
    for key in ("family", "tracked"):
        if a.get(key) != b.get(key):
            print(f"error: runs are not comparable: {key} {a.get(key)} vs {b.get(key)}", file=sys.stderr)
            return EXIT_CONFIG
    # ratio orientation: PID over GRC when the pair is mixed, second over first otherwise
    if a.get("controller") == "pid" and b.get("controller") == "grc":
        a, b = b, a
    width = max(len(k) for k in COMPARE_KEYS)
    label_a = f"{a.get('name')}[{a.get('controller')}]"
    label_b = f"{b.get('name')}[{b.get('controller')}]"
    print(f"{'metric':<{width}}  {label_a:>24}  {label_b:>24}  {'ratio':>10}")
    for key in COMPARE_KEYS:
        va, vb = _num(a.get(key, "nan")), _num(b.get(key, "nan"))
        print(f"{key:<{width}}  {va:>24.6g}  {vb:>24.6g}  {_ratio(vb, va):>10.4g}")
    key = "rmse_velocity" if a.get("tracked") == "velocity" else "rmse_position"
    head = _ratio(_num(b[key]), _num(a[key]))
    if {a.get("controller"), b.get("controller")} == {"grc", "pid"}:
        print(f"PID/GRC {key} ratio = {head:.6g}")
    else:
        print(f"{key} ratio (second/first) = {head:.6g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grcsim", description="Generic robust control simulations for servo actuators.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log warnings and progress")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one simulation")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=PRESETS)
    src.add_argument("--config", type=Path)
    run.add_argument("--controller", choices=("grc", "pid"))
    run.add_argument("--out", help="output directory (default $GRC_SIM_OUT or runs/latest)")
    run.add_argument("--seed", type=int)
    run.add_argument("--duration", type=float)
    run.add_argument("--csv", action="store_true", help="write the telemetry CSV")
    run.add_argument("--metrics", action="store_true", help="write the metrics file")
    run.add_argument("--gnuplot", action="store_true", help="also write a gnuplot script for the CSV")
    run.set_defaults(func=run_command)

    cmp_ = sub.add_parser("compare", help="compare two completed runs")
    cmp_.add_argument("first")
    cmp_.add_argument("second")
    cmp_.set_defaults(func=compare_command)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
