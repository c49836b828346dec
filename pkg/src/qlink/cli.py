"""Command-line front end.

Exit codes: 0 success, 2 invalid input (scenario, ranging file or
arguments), 3 numerical failure (NaN or infinity in an output).
The default output directory is ``$QLINK_OUT`` or the current directory.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from . import __version__, figures, sync
from .scenario import ScenarioError, bundled_scenarios, parse_scenario

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
OUT_ENV = "QLINK_OUT"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _out_dir(args, scenario=None) -> Path:
    if args.out:
        return Path(args.out)
    if scenario is not None and scenario.output_dir:
        return Path(scenario.output_dir)
    return Path(os.environ.get(OUT_ENV, "."))


def _load(ref: str, seed: int | None):
    scn = parse_scenario(ref)
    if seed is not None:
        if seed < 0:
            raise ScenarioError("seed", "must be >= 0")
        scn = dataclasses.replace(scn, seed=seed)
    return scn


def cmd_figure(args) -> int:
    fig_id = args.id.lower()
    if args.scenario is None:
        if fig_id not in figures.FIGURES:
            raise ScenarioError("figure", f"no default scenario for {fig_id!r}")
        ref = figures.FIGURES[fig_id].default_scenario
    else:
        ref = args.scenario
    scn = _load(ref, args.seed)
    csv_path, meta_path = figures.run_figure(fig_id, scn, _out_dir(args, scn))
    print(csv_path)
    print(meta_path)
    return EXIT_OK


def cmd_sweep(args) -> int:
    scn = _load(args.scenario, args.seed)
    csv_path, meta_path = figures.run_sweep(scn, _out_dir(args, scn))
    print(csv_path)
    print(meta_path)
    return EXIT_OK


def cmd_validate(args) -> int:
    scn = parse_scenario(args.scenario)
    axes = ", ".join(f"{a.param} [{a.values[0]:g} .. {a.values[-1]:g}] ({len(a.values)})" for a in scn.sweep)
    print(f"ok: {scn.name}")
    if axes:
        print(f"sweep: {axes}")
    if args.dump:
        print(json.dumps(scn.to_dict(), sort_keys=True, indent=2))
    return EXIT_OK


def cmd_list(args) -> int:
    for fid in sorted(figures.FIGURES, key=figures._fig_key):
        f = figures.FIGURES[fid]
        print(f"{fid:6s} {f.title}  [default scenario: {f.default_scenario}]")
    for fid, why in figures.NO_DATA_FIGURES.items():
        print(f"{fid:6s} no data command: {why}")
    print("bundled scenarios: " + ", ".join(bundled_scenarios()))
    return EXIT_OK


def cmd_sync_analyze(args) -> int:
    series = sync.ingest_ranging(args.file)
    stats = sync.drift_statistics(series, args.bins)
    summary = figures.sync_summary(stats, args.accuracy, series.convention)
    summary["records"] = len(series)
    summary["gaps"] = list(series.gaps)
    rows = list(zip(stats.bin_centers.tolist(), [int(c) for c in stats.counts]))
    figures.check_finite(rows, "sync")
    stem = Path(args.file).stem + ".drift"
    out = _out_dir(args)
    csv_text = figures.render_csv(("bin_center_s_per_s", "count"), rows)
    paths = figures.write_outputs(out, stem, csv_text, figures.render_meta(summary))
    print(f"max |dtau/dt| = {stats.max_abs:.6g} s/s ({series.convention})")
    print(f"range rate c*dtau/dt = {stats.range_rate:.6g} m/s; geometric = {stats.geometric_range_rate:.6g} m/s")
    rate = sync.required_sync_rate(stats.max_abs, args.accuracy)
    print(f"sync rate = {rate.base:.6g} Hz (margin band {rate.low:.6g} - {rate.high:.6g} Hz)")
    for p in paths:
        print(p)
    return EXIT_OK


def cmd_sync_synthesize(args) -> int:
    series = sync.synthesize_pass(args.altitude, args.rate, args.max_elevation, args.min_elevation, args.convention)
    Path(args.output).parent.mkdir(parents=True, exist_ok=True)
    sync.write_ranging(series, args.output)
    print(args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qlink", description="Satellite quantum-link feasibility calculator.")
    p.add_argument("--version", action="version", version=f"qlink {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    f = sub.add_parser("figure", help="write the data behind one figure")
    f.add_argument("id", help="figure id, e.g. fig5")
    f.add_argument("--scenario", help="scenario file or bundled scenario name")
    f.add_argument("--out", help=f"output directory (default ${OUT_ENV} or .)")
    f.add_argument("--seed", type=int, help="override the scenario seed")
    f.set_defaults(func=cmd_figure)

    s = sub.add_parser("sweep", help="evaluate the scenario quantity over its sweep grid")
    s.add_argument("--scenario", required=True)
    s.add_argument("--out")
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("validate", help="check a scenario file")
    v.add_argument("scenario")
    v.add_argument("--dump", action="store_true", help="print the scenario with defaults applied")
    v.set_defaults(func=cmd_validate)

    ls = sub.add_parser("list", help="list figures and bundled scenarios")
    ls.set_defaults(func=cmd_list)

    sy = sub.add_parser("sync", help="ranging drift analysis")
    sysub = sy.add_subparsers(dest="sync_command", required=True, parser_class=_Parser)
    a = sysub.add_parser("analyze", help="drift statistics of a ranging file")
    a.add_argument("file")
    a.add_argument("--accuracy", type=float, default=1e-9, help="target timing accuracy (s)")
    a.add_argument("--bins", type=int, default=50)
    a.add_argument("--out")
    a.set_defaults(func=cmd_sync_analyze)
    g = sysub.add_parser("synthesize", help="write a synthetic circular-orbit ranging pass")
    g.add_argument("output")
    g.add_argument("--altitude", type=float, default=400e3, help="m")
    g.add_argument("--rate", type=float, default=10.0, help="samples per second")
    g.add_argument("--max-elevation", type=float, default=90.0)
    g.add_argument("--min-elevation", type=float, default=10.0)
    g.add_argument("--convention", choices=sorted(sync.CONVENTIONS), default="two-way")
    g.set_defaults(func=cmd_sync_synthesize)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except figures.NumericalError as exc:
        print(f"qlink: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ScenarioError, sync.RangingFormatError) as exc:
        print(f"qlink: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ValueError, OSError) as exc:
        print(f"qlink: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
