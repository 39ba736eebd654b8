"""Command-line front end.

    bingtrap run      (--config PATH | --preset NAME) --out PATH [--t-end T] [--dt DT] [--storage-stride S]
    bingtrap converge (--config PATH | --preset NAME) --dts 1e-3,5e-4 --dt-ref 1e-5 --out PATH
    bingtrap compare  (--config A | --preset A) (--config B | --preset B) --out PATH
    bingtrap preset list
    bingtrap preset show NAME
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace
from pathlib import Path
from typing import Callable, Sequence

from .analysis import GridMismatch, convergence_study, dissipated_energy_total
from .config import PRESET_NAMES, parse_config, preset, render_config, with_dt
from .simulate import (
    NotCommensurate,
    RunConfig,
    Trajectory,
    commensurate_ratio,
    run,
)

TRAJECTORY_COLUMNS = ("t", "u", "v", "f_s", "f_d", "E_d")
COMPARE_COLUMNS = ("t", "u_a", "u_b", "v_a", "v_b", "f_d_a", "f_d_b", "E_d_a", "E_d_b")
CONVERGE_COLUMNS = ("dt", "e_u", "e_v")

# ParseError, ValidationError, NotCommensurate, GridMismatch are ValueErrors;
# StepFailure and NotConverged are RuntimeErrors
_FAILURES = (OSError, ValueError, KeyError, RuntimeError)


def _fmt(x: float) -> str:
    # repr round-trips binary64 exactly
    return repr(float(x))


def _write_rows(out_path: Path, header: Sequence[str], rows, trailer: Sequence[str] = ()) -> None:
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])
        for line in trailer:
            fh.write(line + "\n")


def write_trajectory_csv(traj: Trajectory, out_path: Path) -> None:
    cols = (traj.t, traj.u, traj.v, traj.f_s, traj.f_d, traj.dissipated)
    _write_rows(out_path, TRAJECTORY_COLUMNS, zip(*(c.tolist() for c in cols)))


def read_csv_columns(path: Path) -> dict[str, list[float]]:
    """Read a CSV written by this module; ``#`` lines are skipped."""
    with open(path, newline="", encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    cols: dict[str, list[float]] = {h: [] for h in header}
    for row in reader:
        for h, x in zip(header, row):
            cols[h].append(float(x))
    return cols


def _check_writable(out_path: Path) -> None:
    # fail before a long run, not after
    with open(out_path, "a", encoding="utf-8"):
        pass


def cmd_run(config: RunConfig, out_path: Path, storage_stride: int = 1) -> int:
    out_path = Path(out_path)
    _check_writable(out_path)
    traj = run(config, storage_stride=storage_stride)
    write_trajectory_csv(traj, out_path)
    last = traj.state(len(traj) - 1)
    print(f"# steps = {config.n_steps}")
    print(f"# t = {last.t!r}")
    print(f"# u = {last.u!r}")
    print(f"# v = {last.v!r}")
    print(f"# f_s = {last.f_s!r}")
    print(f"# f_d = {last.f_d!r}")
    print(f"# E_d = {dissipated_energy_total(traj)!r}")
    print(f"# wrote {out_path}")
    return 0


def cmd_converge(
    config: RunConfig,
    dts: Sequence[float],
    dt_ref: float,
    out_path: Path,
    study: Callable[..., object] = convergence_study,
) -> int:
    out_path = Path(out_path)
    for dt in dts:
        commensurate_ratio(dt, dt_ref)
    _check_writable(out_path)
    report = study(config, dts, dt_ref)
    trailer = [
        f"# observed_order_u = {report.observed_order_u!r}",
        f"# observed_order_v = {report.observed_order_v!r}",
    ]
    _write_rows(out_path, CONVERGE_COLUMNS, report.entries, trailer)
    for dt, e_u, e_v in report.entries:
        print(f"# dt = {dt!r}  e_u = {e_u!r}  e_v = {e_v!r}")
    for line in trailer:
        print(line)
    print(f"# wrote {out_path}")
    return 0


def align(a: Trajectory, b: Trajectory, dt_a: float, dt_b: float) -> tuple[Trajectory, Trajectory]:
    """Subsample the finer trajectory onto the coarser grid and trim to common length."""
    if dt_a <= dt_b:
        try:
            a = a.subsample(commensurate_ratio(dt_b, dt_a))
        except NotCommensurate:
            raise GridMismatch(f"grids are not commensurate: dt_a={dt_a!r}, dt_b={dt_b!r}") from None
    else:
        try:
            b = b.subsample(commensurate_ratio(dt_a, dt_b))
        except NotCommensurate:
            raise GridMismatch(f"grids are not commensurate: dt_a={dt_a!r}, dt_b={dt_b!r}") from None
    n = min(len(a), len(b))
    return a.truncate(n), b.truncate(n)


def cmd_compare(config_a: RunConfig, config_b: RunConfig, out_path: Path) -> int:
    out_path = Path(out_path)
    dt_a, dt_b = config_a.ip.dt, config_b.ip.dt
    lo, hi = sorted((dt_a, dt_b))
    try:
        commensurate_ratio(hi, lo)
    except NotCommensurate:
        raise GridMismatch(f"grids are not commensurate: dt_a={dt_a!r}, dt_b={dt_b!r}") from None
    _check_writable(out_path)
    a, b = align(run(config_a), run(config_b), dt_a, dt_b)
    cols = (a.t, a.u, b.u, a.v, b.v, a.f_d, b.f_d, a.dissipated, b.dissipated)
    _write_rows(out_path, COMPARE_COLUMNS, zip(*(c.tolist() for c in cols)))
    print(f"# samples = {len(a)}")
    print(f"# E_d_a = {dissipated_energy_total(a)!r}")
    print(f"# E_d_b = {dissipated_energy_total(b)!r}")
    print(f"# wrote {out_path}")
    return 0


class _SourceAction(argparse.Action):
    """Collect --config/--preset occurrences in command-line order."""

    def __call__(self, parser, namespace, values, option_string=None):
        kind = "config" if option_string == "--config" else "preset"
        sources = list(getattr(namespace, self.dest) or [])
        sources.append((kind, values))
        setattr(namespace, self.dest, sources)


def _dt_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bingtrap", description="Generalized trapezoidal integration of a Bingham/Norton SDOF system.")
    sub = p.add_subparsers(dest="command", required=True)

    def add_source(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--config", dest="sources", action=_SourceAction, metavar="PATH", help="config file")
        sp.add_argument("--preset", dest="sources", action=_SourceAction, metavar="NAME", choices=PRESET_NAMES, help="built-in preset")
        sp.add_argument("--t-end", type=float, help="override final time")

    r = sub.add_parser("run", help="integrate one configuration and write its trajectory")
    add_source(r)
    r.add_argument("--out", required=True, type=Path)
    r.add_argument("--dt", type=float, help="override time step")
    r.add_argument("--storage-stride", type=int, default=1)

    c = sub.add_parser("converge", help="error table against a fine backward-Euler reference")
    add_source(c)
    c.add_argument("--out", required=True, type=Path)
    c.add_argument("--dts", required=True, type=_dt_list)
    c.add_argument("--dt-ref", required=True, type=float)

    m = sub.add_parser("compare", help="side-by-side trajectories of two configurations")
    add_source(m)
    m.add_argument("--out", required=True, type=Path)

    ps = sub.add_parser("preset", help="list or show built-in presets")
    psub = ps.add_subparsers(dest="preset_command", required=True)
    psub.add_parser("list")
    show = psub.add_parser("show")
    show.add_argument("name", choices=PRESET_NAMES)
    show.add_argument("--t-end", type=float)
    return p


def _load(kind: str, value: str, t_end: float | None) -> RunConfig:
    cfg = parse_config(Path(value)) if kind == "config" else preset(value)
    if t_end is not None:
        cfg = replace(cfg, t_end=t_end)
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "preset":
        if args.preset_command == "list":
            for name in PRESET_NAMES:
                print(name)
        else:
            cfg = preset(args.name) if args.t_end is None else preset(args.name, args.t_end)
            sys.stdout.write(render_config(cfg))
        return 0

    sources = args.sources or []
    want = 2 if args.command == "compare" else 1
    if len(sources) != want:
        parser.error(f"{args.command} needs exactly {want} of --config/--preset, got {len(sources)}")

    try:
        configs = [_load(kind, value, args.t_end) for kind, value in sources]
        if args.command == "run":
            cfg = configs[0] if args.dt is None else with_dt(configs[0], args.dt)
            return cmd_run(cfg, args.out, args.storage_stride)
        if args.command == "converge":
            return cmd_converge(configs[0], args.dts, args.dt_ref, args.out)
        return cmd_compare(configs[0], configs[1], args.out)
    except _FAILURES as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
