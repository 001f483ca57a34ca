"""Command-line entry point.

Subcommands: simulate, extract, fit, tables, compare, bench. Durations on
the command line must carry a unit suffix (ns or s); bare numbers are
rejected to keep second/nanosecond slips out of configs. Corner keys use
the lookup-table units (Aex*1e12, B_anis in mT, W in nm).

Exit codes: 0 success, 1 runtime failure, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import dataclasses
import glob
import hashlib
import json
import re
import sys
import traceback
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import (
    CC1DModel,
    InertialModel,
    KinematicModel,
    LinearModel,
    bench,
    cc1d_variants,
    error_report,
)
from .constants import ModelConstants, TrackGeometry
from .dynamics import DwState
from .fitting import (
    DEFAULT_DIFF_LAG,
    DEFAULT_J_CAP,
    DEFAULT_SMOOTH_WINDOW,
    MagTable,
    TrialFeatures,
    extract_position,
    extract_velocity,
    extract_features,
    fit_corner,
    trial_meta_from_filename,
)
from .tables import (
    CONSTANT_NAMES,
    ConstantTable,
    ConstantTableSet,
    CornerKey,
    CornerNotFoundError,
)
from .waveform import DEFAULT_SAMPLE_DT_NS, CurrentWaveform, simulate


class UsageError(Exception):
    """Configuration problem; maps to exit code 2."""


_DURATION_RE = re.compile(r"^\s*([-+0-9.eE]+)\s*(ns|s)\s*$")


def parse_duration_ns(text: str) -> float:
    """Duration with a mandatory ns/s suffix, returned in ns."""
    m = _DURATION_RE.match(text)
    if not m:
        raise UsageError(
            f"duration {text!r} needs a unit suffix ('100ns' or '1e-7s')"
        )
    value = float(m.group(1))
    return value if m.group(2) == "ns" else value * 1e9


def parse_kv(text: str, what: str) -> dict[str, str]:
    out = {}
    for item in text.split(","):
        if "=" not in item:
            raise UsageError(f"bad {what} entry {item!r}, expected key=value")
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def parse_corner(text: str) -> CornerKey:
    kv = parse_kv(text, "corner")
    unknown = set(kv) - {"Aex", "Banis", "alpha", "Msat", "W"}
    if unknown:
        raise UsageError(f"unknown corner keys: {sorted(unknown)}")
    try:
        return CornerKey(
            aex=float(kv["Aex"]),
            b_anis=float(kv["Banis"]),
            alpha=float(kv["alpha"]),
            msat=float(kv["Msat"]),
            width=float(kv["W"]),
        )
    except KeyError as missing:
        raise UsageError(f"corner is missing {missing}") from None


def parse_constants(text: str, p1: float, p2: float, c_r: float) -> ModelConstants:
    kv = parse_kv(text, "constants")
    known = {"c0", "c1", "c2", "c3", "d1", "d2", "drift_const"}
    unknown = set(kv) - known
    if unknown:
        raise UsageError(f"unknown constant keys: {sorted(unknown)}")
    try:
        values = {k: float(v) for k, v in kv.items()}
        if "drift_const" in values:
            if "d1" in values:
                raise UsageError("give either d1 or drift_const, not both")
            values["d1"] = 1.0 / values.pop("drift_const")
        return ModelConstants(
            c0=values["c0"],
            c1=values["c1"],
            c2=values["c2"],
            c3=values["c3"],
            d1=values["d1"],
            d2=values.get("d2", 0.0),
            p1=p1,
            p2=p2,
            c_r=c_r,
        )
    except KeyError as missing:
        raise UsageError(f"constants are missing {missing}") from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def config_hash(payload: dict) -> str:
    text = json.dumps(payload, sort_keys=True, default=str)
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def provenance(payload: dict) -> list[str]:
    return [f"dwkinematics {__version__}", f"config {config_hash(payload)}"]


def _geometry(args) -> TrackGeometry:
    return TrackGeometry(
        length=args.length_nm * 1e-9,
        width=args.width_nm * 1e-9,
        thickness=args.thickness_nm * 1e-9,
    )


def _add_geometry_args(parser) -> None:
    parser.add_argument("--length-nm", type=float, default=500.0, help="track length (nm)")
    parser.add_argument("--width-nm", type=float, default=100.0, help="track width (nm)")
    parser.add_argument(
        "--thickness-nm", type=float, default=1.2, help="track thickness (nm)"
    )


def _add_constants_args(parser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument(
        "--constants",
        help="explicit constants, e.g. c0=5,c1=2e-9,c2=0,c3=0,d1=0.08,d2=0",
    )
    group.add_argument(
        "--corner",
        help="corner key in table units, e.g. Aex=11,Banis=20,alpha=0.01,Msat=7.95e5,W=100",
    )
    parser.add_argument("--tables", help="directory with the six lookup .tbl files")
    parser.add_argument(
        "--mode",
        choices=("exact", "nearest", "multilinear"),
        default="multilinear",
        help="off-corner lookup mode",
    )
    parser.add_argument("--p1", type=float, default=0.0, help="pinning J threshold (A/m^2)")
    parser.add_argument("--p2", type=float, default=0.0, help="pinning v threshold (m/s)")
    parser.add_argument("--cr", type=float, default=0.25, help="restitution coefficient")


def _resolve_constants(args) -> ModelConstants:
    if args.constants:
        return parse_constants(args.constants, args.p1, args.p2, args.cr)
    if not args.tables:
        raise UsageError("--corner needs --tables DIR")
    key = parse_corner(args.corner)
    try:
        tset = ConstantTableSet.load_dir(args.tables)
        result = tset.lookup(key, mode=args.mode)
    except CornerNotFoundError as exc:
        raise UsageError(f"corner not found in tables: {exc.args[0]}") from None
    except (FileNotFoundError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    return result.model_constants(p1=args.p1, p2=args.p2, c_r=args.cr)


def _resolve_waveform(args) -> CurrentWaveform:
    if args.pulse and args.waveform:
        raise UsageError("give either --pulse or --waveform, not both")
    if args.pulse:
        kv = parse_kv(args.pulse, "pulse")
        try:
            j = float(kv["J"])
            tau = parse_duration_ns(kv["tau"])
        except KeyError as missing:
            raise UsageError(f"pulse is missing {missing}") from None
        settle = parse_duration_ns(args.settle) if args.settle else 0.0
        return CurrentWaveform.pulse(j, tau, settle=settle)
    if args.waveform:
        duration = parse_duration_ns(args.duration) if args.duration else None
        return CurrentWaveform.from_csv(args.waveform, duration=duration)
    raise UsageError("need --pulse or --waveform")


# ---------------------------------------------------------------------------
# Subcommands


def cmd_simulate(args) -> int:
    mc = _resolve_constants(args)
    geom = _geometry(args)
    wf = _resolve_waveform(args)
    sample_dt = parse_duration_ns(args.sample_dt)
    initial = None
    if args.start_nm is not None:
        initial = DwState.at_rest(geom, args.start_nm * 1e-9)
    traj = simulate(
        wf,
        mc,
        geom,
        initial=initial,
        sample_dt=sample_dt,
        integrator=args.integrator,
        euler_dt=parse_duration_ns(args.euler_dt),
    )
    payload = {
        "command": "simulate",
        "constants": dataclasses.asdict(mc),
        "geometry": dataclasses.asdict(geom),
        "waveform": {"breakpoints": wf.breakpoints, "duration": wf.duration},
        "sample_dt_ns": sample_dt,
        "integrator": args.integrator,
    }
    out = Path(args.output or "trajectory.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    traj.to_csv(out, header_comments=provenance(payload))
    print(f"wrote {out} ({len(traj.times)} samples)")
    return 0


MOTION_CSV_HEADER = ("time_s", "position_m", "velocity_mps")


def _extract_one(path: Path, args, out_dir: Path) -> tuple[Path, Path | None, str | None]:
    try:
        meta = trial_meta_from_filename(path.name)
        table = MagTable.from_table_txt(
            path,
            spacing=args.spacing_nm * 1e-9,
            trailing_shift_speed=not args.no_shift_column,
        )
        pos = extract_position(table, rezero=not args.no_rezero)
        vel = extract_velocity(pos, table.times, args.lag, args.smooth_window)
        payload = {
            "command": "extract",
            "input": str(path),
            "spacing_nm": args.spacing_nm,
            "lag": args.lag,
            "smooth_window": args.smooth_window,
        }
        out = out_dir / (path.stem + "_motion.csv")
        with open(out, "w") as fh:
            for line in provenance(payload):
                fh.write(f"# {line}\n")
            fh.write(f"# J={meta.j!r} RT={meta.run_time!r}\n")
            fh.write(",".join(MOTION_CSV_HEADER) + "\n")
            for t, x, v in zip(table.times, pos, vel):
                fh.write(f"{float(t)!r},{float(x)!r},{float(v)!r}\n")
        return path, out, None
    except Exception as exc:  # per-file failure; batch continues
        return path, None, str(exc)


def cmd_extract(args) -> int:
    if Path(args.glob).is_file():
        paths = [Path(args.glob)]
    else:
        paths = sorted(Path(p) for p in glob.glob(args.glob))
    if not paths:
        raise UsageError(f"no files match {args.glob!r}")
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        results = list(pool.map(lambda p: _extract_one(p, args, out_dir), paths))
    failures = 0
    for path, out, err in results:
        if err is None:
            print(f"{path} -> {out}")
        else:
            failures += 1
            print(f"FAILED {path}: {err}", file=sys.stderr)
    return 1 if failures else 0


def _load_motion_csv(path: Path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith(MOTION_CSV_HEADER[0]):
                continue
            rows.append([float(c) for c in line.split(",")])
    data = np.array(rows)
    return data[:, 0], data[:, 1], data[:, 2]


def _corner_features(folder: Path, args) -> tuple[CornerKey, list[TrialFeatures]]:
    corner = None
    feats = []
    files = sorted(
        p
        for p in folder.iterdir()
        if p.is_file() and "J=" in p.name and "RT=" in p.name
    )
    if not files:
        raise UsageError(f"{folder}: no trial files (need J=/RT= filename tokens)")
    for path in files:
        meta = trial_meta_from_filename(path.name)
        if meta.corner is None:
            raise UsageError(f"{path.name}: missing corner tokens (Aex/Ku/A/Msat/W)")
        if corner is None:
            corner = meta.corner
        elif corner != meta.corner:
            raise UsageError(
                f"{folder}: mixed corners in one folder ({corner} vs {meta.corner})"
            )
        if path.name.endswith("_motion.csv"):
            times, pos, vel = _load_motion_csv(path)
        else:
            table = MagTable.from_table_txt(
                path,
                spacing=args.spacing_nm * 1e-9,
                trailing_shift_speed=not args.no_shift_column,
            )
            times = table.times
            pos = extract_position(table)
            vel = extract_velocity(pos, times, args.lag, args.smooth_window)
        feats.append(extract_features(pos, vel, times, meta))
    return corner, feats


def cmd_fit(args) -> int:
    fits = []
    failures = 0
    for folder in map(Path, args.folders):
        if not folder.is_dir():
            raise UsageError(f"{folder} is not a directory")
        try:
            corner, feats = _corner_features(folder, args)
            fit = fit_corner(feats, corner=corner, j_cap=args.j_cap)
            fits.append(fit)
            diag = fit.diagnostics
            note = f", truncated at trial {diag.truncated_at}" if diag.truncated_at is not None else ""
            print(
                f"{folder}: fitted {diag.n_used}/{diag.n_trials} trials"
                f" (cubic rms {diag.cubic_residual_rms:.3g} m/s{note})"
            )
        except UsageError:
            raise
        except Exception as exc:
            failures += 1
            print(f"FAILED {folder}: {exc}", file=sys.stderr)
    if not fits:
        print("no corners fitted", file=sys.stderr)
        return 1
    tset = ConstantTableSet.from_fits(fits)
    out_dir = Path(args.output_dir)
    payload = {"command": "fit", "folders": [str(f) for f in args.folders], "j_cap": args.j_cap}
    tset.write_dir(out_dir, extra_comments=provenance(payload))
    print(f"wrote 6 lookup tables to {out_dir}")
    return 1 if failures else 0


def cmd_tables(args) -> int:
    if args.table_cmd == "show":
        tset = ConstantTableSet.load_dir(args.dir)
        print("corners:", len(tset.keys))
        print(f"{'Aex':>8} {'B_anis':>8} {'alpha':>8} {'Msat':>10} {'W':>7} " +
              " ".join(f"{n:>12}" for n in CONSTANT_NAMES))
        for key in sorted(tset.keys, key=lambda k: k.as_tuple()):
            row = [tset.tables[n].value(key) for n in CONSTANT_NAMES]
            print(
                f"{key.aex:8g} {key.b_anis:8g} {key.alpha:8g} {key.msat:10g} "
                f"{key.width:7g} " + " ".join(f"{v:12.5g}" for v in row)
            )
        return 0
    if args.table_cmd == "lookup":
        tset = ConstantTableSet.load_dir(args.dir)
        key = parse_corner(args.corner)
        try:
            result = tset.lookup(key, mode=args.mode)
        except CornerNotFoundError as exc:
            raise UsageError(f"corner not found in tables: {exc.args[0]}") from None
        out = dict(result.values)
        out.update(exact=result.exact, clamped=result.clamped)
        print(json.dumps(out, indent=2))
        return 0
    if args.table_cmd == "merge":
        merged: dict[str, dict] = {n: {} for n in CONSTANT_NAMES}
        for directory in args.dirs:
            tset = ConstantTableSet.load_dir(directory)
            for name in CONSTANT_NAMES:
                for key, value in tset.tables[name].rows:
                    if key in merged[name] and merged[name][key] != value:
                        raise UsageError(
                            f"conflicting values for {key} in {name} while merging"
                        )
                    merged[name][key] = value
        tset = ConstantTableSet(
            {n: ConstantTable(n, tuple(rows.items())) for n, rows in merged.items()}
        )
        payload = {"command": "tables merge", "dirs": [str(d) for d in args.dirs]}
        tset.write_dir(args.out, extra_comments=provenance(payload))
        print(f"merged {len(tset.keys)} corners into {args.out}")
        return 0
    raise UsageError(f"unknown tables subcommand {args.table_cmd!r}")


_BASELINE_CHOICES = ("linear", "inertial", "cc1d", "cc1d_variable_width", "cc1d_fitted")


def _build_models(names: list[str], mc: ModelConstants, j_ref: float, j_max: float):
    models = []
    cc_base = None
    for name in names:
        if name == "kinematic":
            models.append(KinematicModel(mc))
        elif name == "kinematic_euler":
            models.append(KinematicModel(mc, integrator="euler", name="kinematic_euler"))
        elif name == "linear":
            models.append(LinearModel.from_kinematic(mc, j_ref))
        elif name == "inertial":
            models.append(InertialModel.from_kinematic(mc, j_ref))
        elif name in ("cc1d", "cc1d_variable_width", "cc1d_fitted"):
            if cc_base is None:
                cc_base = cc1d_variants(mc, j_ref, j_max=j_max)
            lookup = {m.name: m for m in cc_base}
            lookup["cc1d"] = lookup["cc1d_fixed_width"]
            models.append(lookup[name])
        else:
            raise UsageError(f"unknown model {name!r}")
    return models


def cmd_compare(args) -> int:
    mc = _resolve_constants(args)
    geom = _geometry(args)
    wf = _resolve_waveform(args)
    sample_dt = parse_duration_ns(args.sample_dt)
    j_values = [abs(j) for _, j in wf.breakpoints if j != 0]
    if not j_values:
        raise UsageError("waveform never drives the wall; nothing to compare")
    j_ref = args.j_ref if args.j_ref is not None else max(j_values)
    if args.pulse_end:
        pulse_end = parse_duration_ns(args.pulse_end)
    else:
        pulse_end = max(t1 for _, t1, j in wf.segments() if j != 0)

    reference = KinematicModel(mc).simulate(wf, sample_dt, geom)
    names = [n.strip() for n in args.models.split(",")]
    models = _build_models(names, mc, j_ref, max(j_values))
    rows = []
    for model in models:
        traj = model.simulate(wf, sample_dt, geom)
        rep = error_report(traj, reference, pulse_end)
        rows.append({"model": model.name, **rep.as_dict()})

    payload = {
        "command": "compare",
        "models": names,
        "reference": "kinematic (exact integrator)",
        "j_ref": j_ref,
        "pulse_end_ns": pulse_end,
    }
    fields = ["model", "final_displacement_err", "max_velocity_err", "rms_rise", "rms_stop"]
    if args.format == "json":
        text = json.dumps({"reference": payload["reference"], "rows": rows}, indent=2)
    else:
        lines = [f"# {line}" for line in provenance(payload)]
        lines.append(",".join(fields))
        lines += [",".join(repr(r[f]) if f != "model" else r[f] for f in fields) for r in rows]
        text = "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(text)
        print(f"wrote {args.output}")
    else:
        print(text, end="")
    return 0


def _bench_workload(duration_ns: float, j_scale: float, n_pulses: int) -> CurrentWaveform:
    """Deterministic multi-pulse pattern of alternating signs and varying
    widths filling the requested duration."""
    widths = np.linspace(0.6, 1.4, n_pulses)
    widths *= duration_ns / (2.0 * widths.sum())
    segments = []
    for i, w in enumerate(widths):
        sign = 1 if i % 2 == 0 else -1
        level = j_scale * (0.4 + 0.6 * (i + 1) / n_pulses)
        segments.append((sign * level, w))
        segments.append((0.0, w))
    return CurrentWaveform.from_segments(segments)


def cmd_bench(args) -> int:
    mc = _resolve_constants(args)
    geom = _geometry(args)
    sample_dt = parse_duration_ns(args.sample_dt)
    duration = parse_duration_ns(args.workload_duration)
    wf = _bench_workload(duration, args.j_scale, args.pulses)
    names = [n.strip() for n in args.models.split(",")]
    models = _build_models(names, mc, args.j_scale, args.j_scale)
    report = bench(models, [wf], geom, sample_dt=sample_dt, repetitions=args.repetitions)
    text = report.to_json()
    if args.output:
        Path(args.output).write_text(text)
        print(f"wrote {args.output}")
    else:
        print(text)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dwkinematics",
        description="Kinematic domain-wall device simulation and calibration",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="simulate a wall through a waveform")
    _add_constants_args(sim)
    _add_geometry_args(sim)
    sim.add_argument("--pulse", help="single pulse, e.g. J=4e9,tau=100ns")
    sim.add_argument("--settle", help="zero-drive tail after the pulse (duration)")
    sim.add_argument("--waveform", help="waveform CSV (t_start_ns,J_Apm2 + duration footer)")
    sim.add_argument("--duration", help="waveform duration override")
    sim.add_argument("--sample-dt", default="0.01ns", help="sample interval")
    sim.add_argument("--integrator", choices=("exact", "euler"), default="exact")
    sim.add_argument("--euler-dt", default="1e-3ns", help="Euler substep")
    sim.add_argument("--start-nm", type=float, help="initial position (nm, default center)")
    sim.add_argument("-o", "--output", help="trajectory CSV path")
    sim.set_defaults(func=cmd_simulate)

    ext = sub.add_parser("extract", help="extract wall motion from trajectory tables")
    ext.add_argument("glob", help="input file or glob of mumax-style tables")
    ext.add_argument("--spacing-nm", type=float, default=1.0, help="cell spacing (nm)")
    ext.add_argument("--lag", type=int, default=DEFAULT_DIFF_LAG, help="finite-difference lag")
    ext.add_argument(
        "--smooth-window", type=int, default=DEFAULT_SMOOTH_WINDOW, help="smoothing window"
    )
    ext.add_argument(
        "--no-shift-column",
        action="store_true",
        help="table has no trailing window shift/speed columns",
    )
    ext.add_argument("--no-rezero", action="store_true", help="keep absolute positions")
    ext.add_argument("--output-dir", default=".", help="where to write motion CSVs")
    ext.add_argument("--jobs", type=int, default=None, help="parallel workers")
    ext.set_defaults(func=cmd_extract)

    fit = sub.add_parser("fit", help="fit model constants per corner folder")
    fit.add_argument("folders", nargs="+", help="one folder per parameter corner")
    fit.add_argument("--j-cap", type=float, default=DEFAULT_J_CAP, help="drop trials at/above this J")
    fit.add_argument("--spacing-nm", type=float, default=1.0)
    fit.add_argument("--lag", type=int, default=DEFAULT_DIFF_LAG)
    fit.add_argument("--smooth-window", type=int, default=DEFAULT_SMOOTH_WINDOW)
    fit.add_argument("--no-shift-column", action="store_true")
    fit.add_argument("--output-dir", default="lookup_tables", help="where to write .tbl files")
    fit.set_defaults(func=cmd_fit)

    tab = sub.add_parser("tables", help="inspect, query, or merge lookup tables")
    tab_sub = tab.add_subparsers(dest="table_cmd", required=True)
    show = tab_sub.add_parser("show", help="print all corners and constants")
    show.add_argument("dir")
    lookup = tab_sub.add_parser("lookup", help="resolve constants for a corner")
    lookup.add_argument("dir")
    lookup.add_argument("--corner", required=True)
    lookup.add_argument("--mode", choices=("exact", "nearest", "multilinear"), default="multilinear")
    merge = tab_sub.add_parser("merge", help="merge table directories")
    merge.add_argument("out")
    merge.add_argument("dirs", nargs="+")
    tab.set_defaults(func=cmd_tables)

    cmp_ = sub.add_parser("compare", help="error metrics of baselines vs the kinematic model")
    _add_constants_args(cmp_)
    _add_geometry_args(cmp_)
    cmp_.add_argument("--models", default="linear,inertial,cc1d", help="comma list of baselines")
    cmp_.add_argument("--pulse", help="single pulse, e.g. J=4e9,tau=100ns")
    cmp_.add_argument("--settle", help="zero-drive tail (duration)")
    cmp_.add_argument("--waveform", help="waveform CSV")
    cmp_.add_argument("--duration", help="waveform duration override")
    cmp_.add_argument("--sample-dt", default="0.01ns")
    cmp_.add_argument("--pulse-end", help="pulse end for the metric windows (duration)")
    cmp_.add_argument("--j-ref", type=float, help="calibration drive (default max |J|)")
    cmp_.add_argument("--format", choices=("csv", "json"), default="csv")
    cmp_.add_argument("-o", "--output", help="report path (default stdout)")
    cmp_.set_defaults(func=cmd_compare)

    ben = sub.add_parser("bench", help="wall-clock benchmark of the models")
    _add_constants_args(ben)
    _add_geometry_args(ben)
    ben.add_argument("--models", default="kinematic,linear,inertial,cc1d")
    ben.add_argument("--workload-duration", default="1000ns", help="total simulated time")
    ben.add_argument("--pulses", type=int, default=10, help="pulses in the workload")
    ben.add_argument("--j-scale", type=float, default=2e10, help="pulse amplitude scale (A/m^2)")
    ben.add_argument("--sample-dt", default="0.01ns")
    ben.add_argument("--repetitions", type=int, default=5)
    ben.add_argument("-o", "--output", help="JSON report path (default stdout)")
    ben.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        if "--debug" in (argv or sys.argv):
            traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
