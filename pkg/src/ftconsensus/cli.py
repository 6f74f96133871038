"""Command-line interface: validate, run, and sweep simulations.

Exit codes: 0 success (gain warnings allowed), 1 invalid configuration or
arguments, 2 integration failure.
"""

import argparse
import json
import os
import platform
import sys
import tempfile
import time

import numpy as np

from . import __version__, analysis
from .adaptation import validate_gains
from .config import ConfigError, apply_overrides, build_config, load_raw
from .simulate import HAVE_COMPILED, IntegrationError, simulate, sweep_ic_scale
from .topology import check_assumptions

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INTEGRATION = 2


def _write_json_atomic(path, payload: dict):
    """Write JSON via a temp file and rename so readers never see a torn file."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _gain_reports(config) -> list:
    reports = []
    for step in range(1, config.n_layers + 1):
        rep = validate_gains(config.gains, step)
        reports.append({
            "step": step,
            "all_pass": rep.all_pass,
            "conditions": [
                {"name": c.name, "passed": c.passed, "detail": c.detail}
                for c in rep.conditions
            ],
        })
    return reports


def _print_reports(config, topo_report):
    print(f"topology: {topo_report}")
    for rep in _gain_reports(config):
        warn = [c["name"] for c in rep["conditions"] if not c["passed"]]
        if warn:
            print(f"step {rep['step']}: gain warnings: {', '.join(warn)}")
            for c in rep["conditions"]:
                if not c["passed"]:
                    print(f"  - {c['detail']}")
        else:
            print(f"step {rep['step']}: all gain conditions satisfied")


def _load(args):
    data = apply_overrides(load_raw(args.config), args.set)
    if args.stride is not None:
        data.setdefault("sim", {})["stride"] = args.stride
    return data, build_config(data)


def _manifest(args, out_dir: str, wall: float, extra: dict | None = None) -> dict:
    m = {
        "command": " ".join(sys.argv[1:]),
        "config_path": os.path.abspath(args.config),
        "output_dir": os.path.abspath(out_dir),
        "versions": {
            "ftconsensus": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
            "compiled_kernel": HAVE_COMPILED,
        },
        "wall_time_s": wall,
    }
    if extra:
        m.update(extra)
    return m


def _run_one(config, out_dir: str, kernel: str) -> dict:
    """Simulate one config into out_dir; returns the sidecar payload."""
    os.makedirs(out_dir, exist_ok=True)
    trace = simulate(config, kernel=kernel)
    trace.to_csv(os.path.join(out_dir, "trace.csv"))
    sidecar = {
        "name": config.name,
        "kernel": trace.kernel,
        "config": config.raw,
        "gain_reports": _gain_reports(config),
        "summary": analysis.summarize(trace),
        "columns": list(trace.columns().keys()),
    }
    _write_json_atomic(os.path.join(out_dir, "trace.json"), sidecar)
    return sidecar


def cmd_run(args) -> int:
    t0 = time.monotonic()
    try:
        data, config = _load(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report = check_assumptions(config.topology)
    _print_reports(config, report)
    if not report.all_pass:
        print("error: topology assumptions violated", file=sys.stderr)
        return EXIT_CONFIG
    try:
        sidecar = _run_one(config, args.out, args.kernel)
    except IntegrationError as exc:
        print(f"integration failure: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    summary = sidecar["summary"]
    print(f"settling times (threshold {summary['settling_threshold']}): "
          f"{summary['settling_times']}")
    print(f"final max tracking error: {summary['final_max_tracking_error']:.3g}")
    _write_json_atomic(os.path.join(args.out, "manifest.json"),
                       _manifest(args, args.out, time.monotonic() - t0))
    print(f"wrote trace.csv, trace.json, manifest.json to {args.out}")
    return EXIT_OK


def _sanitize(value: str) -> str:
    return "".join(c if c.isalnum() or c in ".-" else "_" for c in value)


def cmd_sweep(args) -> int:
    t0 = time.monotonic()
    values = [v for v in (s.strip() for s in args.values.split(",")) if v]
    if not values:
        print("error: empty sweep value list", file=sys.stderr)
        return EXIT_CONFIG
    try:
        data, base_config = _load(args)
        configs = []
        for v in values:
            if args.parameter == "ic_scale":
                override = [f"sim.ic_scale={v}"]
            elif args.parameter == "dt":
                override = [f"sim.dt={v}"]
            else:
                override = [f"gains.base.{args.parameter}={v}"]
            configs.append(build_config(apply_overrides(data, override)))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    rows = []
    failures = 0
    for v, cfg in zip(values, configs):
        sub = os.path.join(args.out, f"{args.parameter}={_sanitize(v)}")
        try:
            sidecar = _run_one(cfg, sub, args.kernel)
        except IntegrationError as exc:
            print(f"{args.parameter}={v}: integration failure: {exc}", file=sys.stderr)
            failures += 1
            continue
        times = sidecar["summary"]["settling_times"]
        rows.append([v] + [str(t) for t in times])
        print(f"{args.parameter}={v}: settling times {times}")

    if rows:
        n_agents = len(rows[0]) - 1
        header = [args.parameter] + [f"settling_{i + 1}" for i in range(n_agents)]
        with open(os.path.join(args.out, "sweep_summary.csv"), "w") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(row) + "\n")
    _write_json_atomic(
        os.path.join(args.out, "manifest.json"),
        _manifest(args, args.out, time.monotonic() - t0,
                  {"parameter": args.parameter, "values": values,
                   "failures": failures}),
    )
    return EXIT_INTEGRATION if failures else EXIT_OK


def cmd_validate(args) -> int:
    try:
        data, config = _load(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report = check_assumptions(config.topology)
    _print_reports(config, report)
    if not report.all_pass:
        print("error: topology assumptions violated", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ftconsensus",
        description="Fixed-time leader-follower consensus simulator",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_out):
        p.add_argument("--config", required=True, help="YAML config file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="dotted-path config override (repeatable)")
        p.add_argument("--stride", type=int, default=None,
                       help="record every Nth integration step")
        p.add_argument("--seed", type=int, default=None,
                       help="accepted for symmetry with the test harness; "
                            "the simulation itself is deterministic")
        p.add_argument("--kernel", choices=("auto", "compiled", "python"),
                       default="auto")
        if needs_out:
            p.add_argument("--out", required=True, help="output directory")

    p_run = sub.add_parser("run", help="simulate one config")
    common(p_run, needs_out=True)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="simulate over a parameter grid")
    common(p_sweep, needs_out=True)
    p_sweep.add_argument("--parameter", required=True,
                         help="ic_scale, dt, or a gain field name (e.g. k)")
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated value list")
    p_sweep.set_defaults(func=cmd_sweep)

    p_val = sub.add_parser("validate", help="check a config without simulating")
    common(p_val, needs_out=False)
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
