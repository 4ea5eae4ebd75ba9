"""Command-line entry point: beampattern, estimate, rmse and verify subcommands.

Exit codes: 0 success, 1 bad input, 2 numerical failure, 3 verification
failure. Outputs carry no timestamps, so identical inputs give identical
files.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from . import beampattern as bp
from .array_model import RadarConfig
from .harness import ExperimentSpec, RmseReport, run_sweep
from .monopulse import half_beamwidth, ratio_curve, window
from .pipeline import BeamPair, run_trial
from .row_column import SingularCovarianceError, SubarrayPartition
from .scenario import ScenarioError, ScenarioFile, load_scenario
from .scene import RNG_ALGORITHM
from .waveform_chain import oracle_check

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3
PHASE_BOUND, RIPPLE_BOUND = 0.01, 0.01


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def _clean(obj):
    """JSON-ready copy: numpy scalars to Python, NaN to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return None if not np.isfinite(obj) else float(obj)
    return obj


def write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(_clean(payload), indent=2) + "\n", encoding="utf-8")


def write_table(path: Path, header: Sequence[str], rows: Iterable[Sequence], fmt: str) -> Path:
    """Write a table as CSV (header row, fixed column order) or as JSON columns."""
    rows = list(rows)
    if fmt == "json":
        path = path.with_suffix(".json")
        cols = {h: [r[i] for r in rows] for i, h in enumerate(header)}
        write_json(path, cols)
        return path
    path = path.with_suffix(".csv")
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
    return path


def _apply_flags(sf: ScenarioFile, args) -> ScenarioFile:
    scn = sf.scenario
    changes = {}
    if getattr(args, "snapshots", None) is not None:
        changes["snapshots"] = args.snapshots
    if getattr(args, "partition", None) is not None:
        changes["partition"] = SubarrayPartition.parse(args.partition)
    if changes:
        try:
            scn = replace(scn, **changes)
        except ValueError as exc:
            raise ScenarioError(str(exc)) from None
    experiment = sf.experiment
    if getattr(args, "seed", None) is not None:
        experiment = replace(experiment, seed=args.seed)
    if getattr(args, "trials", None) is not None:
        if args.trials < 1:
            raise ScenarioError("--trials must be at least 1")
        experiment = replace(experiment, trials=args.trials)
    output = sf.output
    if getattr(args, "out_dir", None) is not None:
        output = replace(output, directory=args.out_dir)
    if getattr(args, "format", None) is not None:
        output = replace(output, formats=(args.format,))
    return replace(sf, scenario=scn, experiment=experiment, output=output)


def _out_dir(sf: ScenarioFile) -> Path:
    path = Path(sf.output.directory)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _grid_rows(grid: bp.PatternGrid):
    conv = [_unit(n) for n in grid.axis_names]
    for i, a in enumerate(grid.axis1):
        for j, b in enumerate(grid.axis2):
            yield conv[0](a), conv[1](b), grid.values[i, j]


def _unit(name: str):
    return (lambda x: float(np.rad2deg(x))) if name in ("azimuth", "elevation") else float


def _header(names) -> List[str]:
    return [f"{n}_deg" if n in ("azimuth", "elevation") else (f"{n}_m" if n == "range" else n) for n in names]


def _write_grid(grid: bp.PatternGrid, path: Path, fmt: str) -> str:
    return write_table(path, _header(grid.axis_names) + ["db"], _grid_rows(grid), fmt).name


def _write_cut(c: bp.PatternCut, path: Path, fmt: str) -> str:
    conv = _unit(c.axis_name)
    return write_table(path, _header([c.axis_name]) + ["db"], ((conv(x), v) for x, v in zip(c.axis, c.values)),
                       fmt).name


def cmd_beampattern(sf: ScenarioFile, args) -> int:
    scn, seed = sf.scenario, sf.experiment.seed
    out, fmt = _out_dir(sf), sf.output.formats[0]
    cfg = scn.angle_cfg
    ax = bp.angle_axis(args.span, args.step)
    files: List[str] = []
    summary: Dict[str, object] = {"config": sf.resolved(), "seed": seed, "rng_algorithm": RNG_ALGORITHM}
    jammers = scn.jammers

    result = run_trial(scn, seed, keep_weights=True)
    angle = {k: v for k, v in result.beams.items() if v.plane == "azimuth_elevation"}
    quiet_sum = next(iter(angle.values())).quiescent_sum
    grid = bp.evaluate(cfg, quiet_sum, "azimuth_elevation", ax, ax, "quiescent_sum")
    files.append(_write_grid(grid, out / "pattern_quiescent_sum", fmt))
    if not jammers:
        summary.update(adaptive=False, nulls=[], files=files)
        write_json(out / "beampattern_summary.json", summary)
        return EXIT_OK

    for axis in ("elevation", "azimuth"):
        g = bp.evaluate(cfg, angle[axis].adaptive_sum, "azimuth_elevation", ax, ax, f"adaptive_{axis}_sum")
        files.append(_write_grid(g, out / f"pattern_adaptive_{axis}_sum", fmt))
    # one entry per jammer: elevation-sum beam cut along azimuth, azimuth-sum beam cut along elevation
    nulls = []
    look = (scn.steer.azimuth, scn.steer.elevation)
    for j in jammers:
        d = j.direction
        entry = {"jammer": j.name, "azimuth_deg": np.rad2deg(d.azimuth), "elevation_deg": np.rad2deg(d.elevation)}
        for axis, cut_axis in (("elevation", "azimuth"), ("azimuth", "elevation")):
            pair = angle[axis]
            if cut_axis == "azimuth":
                g = bp.evaluate(cfg, pair.adaptive_sum, "azimuth_elevation", ax, [d.elevation])
                c, loc = bp.cut(g, "azimuth", d.elevation), d.azimuth
            else:
                g = bp.evaluate(cfg, pair.adaptive_sum, "azimuth_elevation", [d.azimuth], ax)
                c, loc = bp.cut(g, "elevation", d.azimuth), d.elevation
            files.append(_write_cut(c, out / f"cut_adaptive_{axis}_sum_{cut_axis}_{j.name}", fmt))
            entry[f"{axis}_sum_{cut_axis}_cut_null_db"] = bp.null_depth(c, loc)
            entry[f"{axis}_sum_suppression_db"] = bp.suppression_db(
                cfg, pair.adaptive_sum, pair.quiescent_sum, "azimuth_elevation", look, (d.azimuth, d.elevation))
        nulls.append(entry)
    # orthogonal cuts through the steer point
    ortho = {}
    for axis in ("elevation", "azimuth"):
        pair = angle[axis]
        if axis == "elevation":
            a = bp.cut(bp.evaluate(cfg, pair.adaptive_sum, "azimuth_elevation", [scn.steer.azimuth], ax), axis,
                       scn.steer.azimuth)
            q = bp.cut(bp.evaluate(cfg, pair.quiescent_sum, "azimuth_elevation", [scn.steer.azimuth], ax), axis,
                       scn.steer.azimuth)
        else:
            a = bp.cut(bp.evaluate(cfg, pair.adaptive_sum, "azimuth_elevation", ax, [scn.steer.elevation]), axis,
                       scn.steer.elevation)
            q = bp.cut(bp.evaluate(cfg, pair.quiescent_sum, "azimuth_elevation", ax, [scn.steer.elevation]), axis,
                       scn.steer.elevation)
        files.append(_write_cut(a, out / f"cut_adaptive_{axis}_sum_{axis}", fmt))
        files.append(_write_cut(q, out / f"cut_quiescent_sum_{axis}", fmt))
        ortho[f"{axis}_sum_{axis}_cut_max_deviation_db"] = bp.mainlobe_deviation(a, q)
    if "range" in result.beams:
        pair = result.beams["range"]
        rax = bp.range_axis(scn.steer.range, args.range_span, args.range_step)
        el = result.estimate.elevation
        for label, w in (("quiescent_range_sum", pair.quiescent_sum), ("adaptive_range_sum", pair.adaptive_sum)):
            g = bp.evaluate(pair.cfg, w, "azimuth_range", ax, rax, label, elevation=el)
            files.append(_write_grid(g, out / f"pattern_{label}", fmt))
    summary.update(adaptive=True, nulls=nulls, orthogonal_cuts=ortho, files=files)
    write_json(out / "beampattern_summary.json", summary)
    return EXIT_OK


def _ratio_curve_rows(scn, pair: BeamPair, axis: str, points: int):
    cfg = pair.cfg
    half = 0.9 * window(cfg, scn.steer, axis)
    offsets = np.linspace(-half, half, points)
    base = {"elevation": scn.steer.elevation, "azimuth": scn.steer.azimuth, "range": scn.steer.range}[axis]
    if axis == "elevation":
        x1, x2, plane = np.full_like(offsets, scn.steer.azimuth), base + offsets, "azimuth_elevation"
    elif axis == "azimuth":
        x1, x2, plane = base + offsets, np.full_like(offsets, scn.steer.elevation), "azimuth_elevation"
    else:
        x1, x2, plane = np.full_like(offsets, scn.steer.azimuth), base + offsets, "azimuth_range"

    def ratio(s, d):
        return (bp.response(cfg, d, plane, x1, x2) / bp.response(cfg, s, plane, x1, x2)).imag

    quiet = ratio(pair.quiescent_sum, pair.quiescent_diff)
    adapt = ratio(pair.adaptive_sum, pair.adaptive_diff)
    closed = ratio_curve(cfg, scn.steer, axis, offsets)
    conv = (lambda x: float(np.rad2deg(x))) if axis != "range" else float
    for k in range(points):
        yield conv(offsets[k]), quiet[k], adapt[k], closed[k]


def cmd_estimate(sf: ScenarioFile, args) -> int:
    scn, seed = sf.scenario, sf.experiment.seed
    out, fmt = _out_dir(sf), sf.output.formats[0]
    result = run_trial(scn, seed, keep_weights=True)
    files = []
    for axis, pair in result.beams.items():
        unit = "m" if axis == "range" else "deg"
        files.append(write_table(out / f"ratio_curve_{axis}",
                                 [f"offset_{unit}", "quiescent_im", "adaptive_im", "closed_form_im"],
                                 _ratio_curve_rows(scn, pair, axis, args.points), fmt).name)
    est = result.estimate
    payload = {
        "elevation_deg": np.rad2deg(est.elevation),
        "azimuth_deg": np.rad2deg(est.azimuth),
        "range_m": est.range,
        "valid": est.valid,
        "ratios_im": {k: float(np.imag(v)) for k, v in result.ratios.items()},
        "seed": seed,
        "rng_algorithm": RNG_ALGORITHM,
        "config": sf.resolved(),
        "files": files,
    }
    write_json(out / "estimate.json", payload)
    print(f"elevation {payload['elevation_deg']:.5f} deg, azimuth {payload['azimuth_deg']:.5f} deg, "
          f"range {'n/a' if est.range is None else f'{est.range:.2f} m'}")
    return EXIT_OK


RMSE_HEADER = ["sweep_value", "rmse_elevation_deg", "rmse_azimuth_deg", "rmse_range_m", "valid_trials"]


def _report_rows(rep: RmseReport):
    for p in rep.points:
        yield p.value, p.rmse_elevation_deg, p.rmse_azimuth_deg, p.rmse_range_m, p.valid_trials


def cmd_rmse(sf: ScenarioFile, args) -> int:
    ex = sf.experiment
    out, fmt = _out_dir(sf), sf.output.formats[0]
    sweeps = [("snr", ex.snr_db), ("offset", ex.offset_azimuth_deg)]
    sweeps = [(k, v) for k, v in sweeps if v]
    if not sweeps:
        raise ScenarioError("experiment block defines neither 'snr_db' nor 'offset_azimuth_deg'")
    files, flagged = [], []
    for kind, values in sweeps:
        for baseline in ex.baselines:
            spec = ExperimentSpec(sf.scenario, kind, values, ex.trials, ex.seed, baseline, ex.workers)
            rep = run_sweep(spec)
            files.append(write_table(out / f"rmse_{kind}_{baseline}", RMSE_HEADER, _report_rows(rep), fmt).name)
            flagged += [{"sweep": kind, "baseline": baseline, "value": p.value} for p in rep.points if p.flagged]
    write_json(out / "rmse_summary.json", {"config": sf.resolved(), "rng_algorithm": RNG_ALGORITHM,
                                           "flagged_points": flagged, "files": files})
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = RadarConfig(rows=4, cols=4)
    res = oracle_check(cfg, args.emitters, args.seed if args.seed is not None else 0)
    ok = res.max_phase_error < PHASE_BOUND and res.max_ripple < RIPPLE_BOUND
    print(f"max phase error {res.max_phase_error:.3e} rad (bound {PHASE_BOUND}), "
          f"max ripple {res.max_ripple:.3e} (bound {RIPPLE_BOUND}) over {res.emitters} emitters: "
          f"{'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stca-monopulse", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scenario=True):
        if scenario:
            p.add_argument("scenario", help="scenario TOML path or a bundled name "
                                            "(table2_four_channel, table2_row_column)")
        p.add_argument("--seed", type=int)
        p.add_argument("--out-dir")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--partition", help="subarray tiles as PxQ")
        p.add_argument("--snapshots", type=int)
        p.add_argument("--trials", type=int)

    p = sub.add_parser("beampattern", help="adaptive and quiescent pattern grids, cuts and null depths")
    common(p)
    p.add_argument("--span", type=float, default=10.0, help="angle half-span in degrees")
    p.add_argument("--step", type=float, default=0.05, help="angle step in degrees")
    p.add_argument("--range-span", type=float, default=600.0, help="range half-span in meters")
    p.add_argument("--range-step", type=float, default=1.0, help="range step in meters")
    p = sub.add_parser("estimate", help="single-trial point estimate and ratio curves")
    common(p)
    p.add_argument("--points", type=int, default=181, help="samples per ratio curve")
    p = sub.add_parser("rmse", help="Monte-Carlo RMSE sweeps")
    common(p)
    p = sub.add_parser("verify", help="waveform-chain oracle check at 4 x 4")
    p.add_argument("--seed", type=int)
    p.add_argument("--emitters", type=int, default=20)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args)
        sf = _apply_flags(load_scenario(args.scenario), args)
        handler = {"beampattern": cmd_beampattern, "estimate": cmd_estimate, "rmse": cmd_rmse}[args.command]
        return handler(sf, args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SingularCovarianceError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
