"""Command-line driver: run scenarios, verify structure, emit curves, inspect.

Exit codes: 0 success, 1 configuration error, 2 numerical abort (partial
outputs are kept) or failed verification.  A batch directory of scenarios is
processed in parallel, capped by the CURVEFLOW_THREADS environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from ._backend import backend_name
from .curves import (
    ConfigurationError,
    CurveflowError,
    DiscreteCurve,
    curvature_sq,
    load_curve,
    make_curve,
    save_curve,
    torsion,
)
from .flow import FlowAborted, SimulationResult, simulate
from .forms import CurvatureWeighted, Identity
from .hamiltonians import spec_name
from .momentum import momentum_record
from .scenario import Scenario, load_scenario
from .verify import (
    CheckReport,
    check_closedness,
    check_form_consistency,
    check_gradient,
    check_hamiltonian_identity,
    check_invariances,
    standard_battery,
)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CurveflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curveflow",
        description="Hamiltonian flows of closed space curves under weighted "
        "symplectic structures",
    )
    sub = parser.add_subparsers(required=True)

    run = sub.add_parser("run", help="simulate one scenario file or a directory")
    run.add_argument("--scenario", required=True, help="scenario file or directory")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--seed", type=int, default=None, help="override scenario seed")
    run.add_argument(
        "--verify-only",
        action="store_true",
        help="run the structural checks for the scenario instead of the flow",
    )
    run.set_defaults(func=_cmd_run)

    ver = sub.add_parser("verify", help="run the standard structural check battery")
    ver.add_argument("--out", required=True, help="output directory")
    ver.add_argument("--seed", type=int, default=42)
    ver.add_argument("--check-n", type=int, default=1024, help="resolution for FD checks")
    ver.set_defaults(func=_cmd_verify)

    cur = sub.add_parser("curves", help="emit a built-in initial curve file")
    cur.add_argument("--family", required=True, choices=["circle", "trefoil", "torus_knot"])
    cur.add_argument("--n", type=int, required=True)
    cur.add_argument("--radius", type=float, default=None)
    cur.add_argument("--p", type=int, default=None)
    cur.add_argument("--q", type=int, default=None)
    cur.add_argument("--big-radius", type=float, default=None)
    cur.add_argument("--small-radius", type=float, default=None)
    cur.add_argument("--out", required=True, help="output curve file")
    cur.set_defaults(func=_cmd_curves)

    ins = sub.add_parser("inspect", help="print diagnostics of a curve file")
    ins.add_argument("--curve", required=True)
    ins.add_argument("--json", action="store_true", help="emit JSON instead of text")
    ins.set_defaults(func=_cmd_inspect)
    return parser


# ---------------------------------------------------------------------------
# run


def _cmd_run(args) -> int:
    scenario_path = Path(args.scenario)
    out_root = Path(args.out)
    if scenario_path.is_dir():
        files = sorted(
            p for p in scenario_path.iterdir() if p.suffix in (".scenario", ".txt", ".ini")
        )
        if not files:
            raise ConfigurationError(f"no scenario files in {scenario_path}")
        workers = _thread_cap(len(files))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            codes = list(
                pool.map(
                    lambda p: _run_one(p, out_root / p.stem, args), files
                )
            )
        return max(codes)
    return _run_one(scenario_path, out_root, args)


def _thread_cap(njobs: int) -> int:
    raw = os.environ.get("CURVEFLOW_THREADS", "")
    try:
        cap = int(raw) if raw else (os.cpu_count() or 1)
    except ValueError:
        cap = os.cpu_count() or 1
    return max(1, min(njobs, cap))


def _run_one(path: Path, outdir: Path, args) -> int:
    scenario = load_scenario(path)
    if args.seed is not None:
        scenario = replace(scenario, seed=args.seed)
    outdir.mkdir(parents=True, exist_ok=True)
    if args.verify_only:
        reports = _scenario_battery(scenario)
        _write_checks(outdir, scenario, reports)
        _print_reports(reports)
        return 0 if all(r.passed for r in reports) else 2
    try:
        result = simulate(scenario)
    except FlowAborted as exc:
        _write_outputs(outdir, scenario, exc.result, status=2, reason=str(exc))
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _write_outputs(outdir, scenario, result, status=0, reason=None)
    return 0


def _scenario_battery(scenario: Scenario):
    factory = lambda n: scenario.curve.make(n)
    c = scenario.curve.make()
    reports = [check_gradient(scenario.hamiltonian, c, seed=scenario.seed)]
    reports.append(check_form_consistency(scenario.weight, c, seed=scenario.seed))
    reports.append(check_closedness(scenario.weight, c, seed=scenario.seed))
    if not isinstance(scenario.weight, CurvatureWeighted):
        reports.append(
            check_hamiltonian_identity(
                scenario.hamiltonian, scenario.weight, factory, seed=scenario.seed
            )
        )
    reports.extend(check_invariances(scenario.weight, factory, seed=scenario.seed))
    return reports


# ---------------------------------------------------------------------------
# outputs


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def export_frames_csv(path, frames, steps) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("frame,vertex,x,y,z\n")
        for fi, c in enumerate(frames):
            for vi, (x, y, z) in enumerate(c.vertices):
                fh.write(f"{fi},{vi},{_fmt(x)},{_fmt(y)},{_fmt(z)}\n")


def export_frames_obj(path, frames) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        offset = 1
        for fi, c in enumerate(frames):
            fh.write(f"o frame_{fi:06d}\n")
            for x, y, z in c.vertices:
                fh.write(f"v {_fmt(x)} {_fmt(y)} {_fmt(z)}\n")
            loop = " ".join(str(offset + j) for j in range(c.n))
            fh.write(f"l {loop} {offset}\n")
            offset += c.n


DIAG_COLUMNS = (
    "step,time,hamiltonian,length,min_edge,max_speed,"
    "angular_x,angular_y,angular_z,linear_x,linear_y,linear_z,"
    "repar_residual,resampled"
)


def export_diagnostics_csv(path, diagnostics) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(DIAG_COLUMNS + "\n")
        for d in diagnostics:
            row = [
                str(d.step),
                _fmt(d.time),
                _fmt(d.hamiltonian_value),
                _fmt(d.length),
                _fmt(d.min_edge),
                _fmt(d.max_speed),
                *(_fmt(x) for x in d.momenta.angular),
                *(_fmt(x) for x in d.momenta.linear),
                _fmt(d.momenta.repar_residual),
                "1" if d.resampled else "0",
            ]
            fh.write(",".join(row) + "\n")


def _drifts(result: SimulationResult) -> dict:
    if not result.diagnostics:
        return {}
    first, last = result.diagnostics[0], result.diagnostics[-1]
    h0, h1 = first.hamiltonian_value, last.hamiltonian_value
    l0, l1 = first.length, last.length
    p0 = np.asarray(first.momenta.linear)
    p1 = np.asarray(last.momenta.linear)
    return {
        "hamiltonian_rel": abs(h1 - h0) / (abs(h0) + 1e-12),
        "length_rel": abs(l1 - l0) / (abs(l0) + 1e-12),
        "linear_momentum_rel": float(
            np.linalg.norm(p1 - p0) / (np.linalg.norm(p0) + 1e-12)
        ),
    }


def _write_outputs(outdir: Path, scenario: Scenario, result, status: int, reason) -> None:
    if "frames_csv" in scenario.outputs:
        export_frames_csv(outdir / "frames.csv", result.frames, scenario.steps)
    if "frames_obj" in scenario.outputs:
        export_frames_obj(outdir / "frames.obj", result.frames)
    if "diagnostics_csv" in scenario.outputs:
        export_diagnostics_csv(outdir / "diagnostics.csv", result.diagnostics)
    if "summary_json" in scenario.outputs:
        summary = {
            "scenario": scenario.echo(),
            "backend": backend_name(),
            "status": status,
            "abort_reason": reason,
            "completed_steps": result.completed_steps,
            "drifts": _drifts(result),
        }
        _dump_json(outdir / "summary.json", summary)


def _write_checks(outdir: Path, scenario, reports) -> None:
    summary = {
        "scenario": scenario.echo(),
        "backend": backend_name(),
        "status": 0 if all(r.passed for r in reports) else 2,
        "checks": [r.to_dict() for r in reports],
    }
    _dump_json(outdir / "summary.json", summary)
    _dump_json(outdir / "checks.json", [r.to_dict() for r in reports])


def _dump_json(path, payload) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _print_reports(reports) -> None:
    width = max(len(r.name) for r in reports)
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        orders = (
            ""
            if r.refinement_orders is None
            else "  orders=" + ",".join(f"{o:g}" for o in r.refinement_orders)
        )
        print(f"{r.name:<{width}}  residual={r.residual:.3e}  tol={r.tolerance:g}  "
              f"{status}{orders}")


# ---------------------------------------------------------------------------
# verify / curves / inspect


def _cmd_verify(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    reports = standard_battery(seed=args.seed, check_n=args.check_n)
    _dump_json(outdir / "checks.json", [r.to_dict() for r in reports])
    _print_reports(reports)
    ok = all(r.passed for r in reports)
    print(f"{sum(r.passed for r in reports)}/{len(reports)} checks passed")
    return 0 if ok else 2


def _cmd_curves(args) -> int:
    params = {}
    if args.radius is not None:
        params["radius"] = args.radius
    for key in ("p", "q"):
        val = getattr(args, key)
        if val is not None:
            params[key] = val
    if args.big_radius is not None:
        params["big_radius"] = args.big_radius
    if args.small_radius is not None:
        params["small_radius"] = args.small_radius
    c = make_curve(args.family, args.n, **params)
    out = Path(args.out)
    if out.parent != Path("."):
        out.parent.mkdir(parents=True, exist_ok=True)
    save_curve(out, c)
    print(f"wrote {args.family} with {c.n} vertices to {out}")
    return 0


def _cmd_inspect(args) -> int:
    c = load_curve(args.curve)
    k2 = curvature_sq(c)
    tau = torsion(c)
    rec = momentum_record(Identity(), c)
    info = {
        "vertices": c.n,
        "length": c.measure.total_length,
        "min_edge": float(c.measure.edge_lengths.min()),
        "max_edge": float(c.measure.edge_lengths.max()),
        "curvature_sq": {"min": float(k2.min()), "mean": float(k2.mean()), "max": float(k2.max())},
        "torsion": {"min": float(tau.min()), "mean": float(tau.mean()), "max": float(tau.max())},
        "linear_momentum": list(rec.linear),
        "angular_momentum": list(rec.angular),
        "repar_residual": rec.repar_residual,
    }
    if args.json:
        print(json.dumps(info, indent=2, sort_keys=True))
    else:
        print(f"vertices        {info['vertices']}")
        print(f"length          {info['length']:.12g}")
        print(f"edge range      [{info['min_edge']:.6g}, {info['max_edge']:.6g}]")
        print(f"curvature^2     min {k2.min():.6g}  mean {k2.mean():.6g}  max {k2.max():.6g}")
        print(f"torsion         min {tau.min():.6g}  mean {tau.mean():.6g}  max {tau.max():.6g}")
        print(f"linear momentum  ({', '.join(f'{x:.6g}' for x in rec.linear)})")
        print(f"angular momentum ({', '.join(f'{x:.6g}' for x in rec.angular)})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
