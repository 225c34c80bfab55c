"""Command-line front end.

Subcommands: ``preset``, ``spectrum``, ``bistability``, ``sweep`` and
``oracle-check``.  Exit codes are stable for scripting: 0 on success, 2
on validation errors (bad config, bad grid, ambiguous branch), 3 on
numerical failures (no convergence, instability, divergence).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import QomspecError
from .params import DetuningGrid, load_params
from .spectra import SPECTRUM_COLUMNS, spectrum_rows, spectrum_sweep, window_analysis
from .steady import phonon_bistability_curve, photon_bistability_curve
from .sweeps import (PRESET_NAMES, SweepSpec, oracle_check, run_preset,
                     run_sweep, worker_count, write_csv, write_json)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qomspec",
        description="Steady states, bistability curves and weak-probe "
                    "transmission spectra of a driven optomechanical cavity "
                    "with a qubit-coupled mechanical mode.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preset", help="emit the dataset files of a named preset")
    p.add_argument("name", choices=PRESET_NAMES)
    p.add_argument("--out", default="out", help="output directory")

    p = sub.add_parser("spectrum", help="probe spectrum over a detuning grid")
    p.add_argument("--config", required=True, help="parameter file (Hz keys)")
    p.add_argument("--branch", type=int, default=None,
                   help="steady-branch index when several are stable")
    p.add_argument("--grid-lo", type=float, default=0.8,
                   help="grid start in units of omega_b")
    p.add_argument("--grid-hi", type=float, default=1.2,
                   help="grid end in units of omega_b")
    p.add_argument("--points", type=int, default=2001)
    p.add_argument("--dump-response", action="store_true",
                   help="also write the per-detuning coefficient dump (JSONL)")
    p.add_argument("--out", default="out")

    p = sub.add_parser("bistability", help="closed-form drive-vs-amplitude curve")
    p.add_argument("--config", required=True)
    p.add_argument("--mode", choices=("photon", "phonon"), required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--z0", type=float, default=None,
                       help="hold the inversion fixed at this value")
    group.add_argument("--self-consistent", action="store_true",
                       help="recompute the inversion at every grid point (default)")
    p.add_argument("--x-max", type=float, default=30.0,
                   help="upper end of the photon-number grid")
    p.add_argument("--points", type=int, default=1200)
    p.add_argument("--out", default="out")

    p = sub.add_parser("sweep", help="generic 1-D/2-D parameter sweep")
    p.add_argument("--spec", required=True, help="JSON sweep specification")
    p.add_argument("--out", default="out")

    p = sub.add_parser("oracle-check",
                       help="formula vs time-domain sideband comparison")
    p.add_argument("--config", required=True)
    p.add_argument("--eps-ratio", type=float, required=True,
                   help="probe/drive amplitude ratio (at most 1e-2)")
    p.add_argument("--grid-lo", type=float, default=0.9)
    p.add_argument("--grid-hi", type=float, default=1.1)
    p.add_argument("--points", type=int, default=21)
    p.add_argument("--backend", choices=("compiled", "python"), default=None)
    p.add_argument("--dump-trajectories", action="store_true",
                   help="also write the sampled trajectory (CSV) and the "
                        "extracted harmonics (JSON) per detuning; large files")
    p.add_argument("--out", default="out")
    return parser


def _cmd_preset(args) -> int:
    manifest = run_preset(args.name, args.out)
    print(f"wrote {manifest}")
    return 0


def _cmd_spectrum(args) -> int:
    params = load_params(args.config)
    grid = DetuningGrid.around_mechanical_resonance(
        params, args.grid_lo, args.grid_hi, args.points)
    points = spectrum_sweep(params, grid, branch=args.branch)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "spectrum.csv", SPECTRUM_COLUMNS,
              spectrum_rows(points, params.omega_b))
    report = window_analysis(points, params.gamma_a)
    write_json(out / "windows.json", report.to_dict())
    if args.dump_response:
        from .response import compute_response
        from .steady import solve_steady_states
        from .spectra import select_branch

        steady = select_branch(params, solve_steady_states(params), args.branch)
        with open(out / "response_dump.jsonl", "w") as fh:
            for delta in grid:
                coeffs = compute_response(params, steady, float(delta))
                fh.write(json.dumps(coeffs.to_debug_dict(), sort_keys=True) + "\n")
    print(f"wrote {out / 'spectrum.csv'} ({len(points)} points, "
          f"{report.count} transparency window(s))")
    return 0


def _cmd_bistability(args) -> int:
    params = load_params(args.config)
    z0 = None if args.self_consistent else args.z0
    x_grid = np.linspace(1e-6, args.x_max, args.points)
    if args.mode == "photon":
        curve = photon_bistability_curve(params, x_grid, z0=z0)
    else:
        curve = phonon_bistability_curve(params, x_grid=x_grid, z0=z0)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"bistability_{args.mode}.csv"
    write_csv(path, ("x", "omega_abs", "branch_id", "z0", "defect"),
              zip(curve.x_values, curve.omega_values, curve.branch_ids,
                  curve.z0_values, curve.defects))
    print(f"wrote {path} (monotonic={curve.is_monotonic()})")
    return 0


def _cmd_sweep(args) -> int:
    spec = SweepSpec.from_file(args.spec)
    result = run_sweep(spec, workers=worker_count())
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result.to_csv(out / "sweep.csv")
    failures = sum(1 for row in result.rows if row[-1])
    print(f"wrote {out / 'sweep.csv'} ({len(result.rows)} rows, "
          f"{failures} failed points)")
    return 0


def _cmd_oracle_check(args) -> int:
    from .oracle import trajectory_to_rows

    params = load_params(args.config)
    deltas = np.linspace(args.grid_lo * params.omega_b,
                         args.grid_hi * params.omega_b, args.points)
    report = oracle_check(params, deltas, args.eps_ratio,
                          workers=worker_count(), backend=args.backend,
                          keep_details=args.dump_trajectories)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "oracle_check.json", report.to_dict())
    if args.dump_trajectories:
        for k, (traj, result) in enumerate(report.details):
            write_csv(out / f"trajectory_{k:03d}.csv",
                      ("t", "re_a", "im_a", "re_b", "im_b",
                       "re_s_minus", "im_s_minus", "s_z"),
                      trajectory_to_rows(traj))
            write_json(out / f"harmonics_{k:03d}.json", result.to_dict())
    status = "PASS" if report.passed else "FAIL"
    print(f"{status}: max rel err A-={report.max_err_a_minus:.3e} "
          f"A+={report.max_err_a_plus:.3e} (threshold {report.threshold:.1e}, "
          f"backend {report.backend})")
    return 0 if report.passed else 3


_COMMANDS = {
    "preset": _cmd_preset,
    "spectrum": _cmd_spectrum,
    "bistability": _cmd_bistability,
    "sweep": _cmd_sweep,
    "oracle-check": _cmd_oracle_check,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except QomspecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
