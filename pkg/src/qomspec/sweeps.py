"""Figure presets, generic parameter sweeps and the oracle cross-check.

Everything here writes deterministic artifacts: CSV numbers carry 17
significant digits, rows come out in axis-major order, and each preset
drops a JSON manifest from which every curve can be reproduced exactly
through :func:`qomspec.params.load_params`.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import oracle as oracle_mod
from .errors import QomspecError, ValidationError
from .params import DetuningGrid, SystemParams, load_params
from .response import compute_response
from .spectra import (SPECTRUM_COLUMNS, select_branch, spectrum_point,
                      spectrum_rows, spectrum_sweep, window_analysis)
from .steady import (count_real_solutions, phonon_bistability_curve,
                     photon_bistability_curve, solve_steady_states)

WORKERS_ENV = "QOMSPEC_WORKERS"

# caption-level parameter sets shared by the figure presets (Hz)
_BASE_HZ = {
    "omega_b_hz": 100e6,
    "omega_q_hz": 100e6,
    "chi_hz": 10e6,
    "g_hz": 10e6,
    "gamma_a_hz": 4e6,
    "gamma_q_hz": 0.1e6,
    "gamma_b_hz": 1000.0,
    "delta_a_hz": 50e6,
    "drive_hz": 19.8e6,
    "probe_hz": 19.8e3,
}

PRESET_NAMES = ("fig2", "fig3", "fig5", "fig6", "fig7", "fig8", "fig9")


def worker_count() -> int:
    """Worker pool size, from the QOMSPEC_WORKERS environment variable."""
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValidationError(f"{WORKERS_ENV} must be an integer, got {raw!r}")
    return max(1, n)


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def write_csv(path: Path, columns, rows) -> None:
    """Deterministic CSV: fixed column order, 17-significant-digit floats."""
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, (int, float, np.floating))
                              and not isinstance(v, bool) else str(v)
                              for v in row))
    path.write_text("\n".join(lines) + "\n")


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# generic sweeps

_SWEEP_QUANTITIES = ("mu_p", "nu_p", "G_s", "G_as",
                     "photon_number", "phonon_number", "branch_count")
# accepted spellings for the amplitude-squared quantities
_QUANTITY_ALIASES = {"|A0|^2": "photon_number", "|B0|^2": "phonon_number"}


@dataclass(frozen=True)
class SweepSpec:
    """One- or two-axis sweep of a scalar quantity.

    Axes name Hz-keyed parameter fields (e.g. ``g_hz``) or the probe
    detuning ``delta_hz``.  Spectral quantities need a detuning, either as
    an axis or through ``delta_hz``.
    """

    base: SystemParams
    axis1: tuple
    axis2: tuple | None
    quantity: str
    delta_hz: float | None = None

    def __post_init__(self):
        quantity = _QUANTITY_ALIASES.get(self.quantity, self.quantity)
        object.__setattr__(self, "quantity", quantity)
        if quantity not in _SWEEP_QUANTITIES:
            raise ValidationError(f"unknown sweep quantity {self.quantity!r}; "
                                  f"expected one of {_SWEEP_QUANTITIES}")
        for axis in (self.axis1, self.axis2):
            if axis is None:
                continue
            name, values = axis
            if name != "delta_hz" and f"{name}" not in _axis_fields():
                raise ValidationError(f"axis field {name!r} is not a parameter "
                                      "field (expected a *_hz key or delta_hz)")
            arr = np.asarray(values, dtype=float)
            if arr.ndim != 1 or arr.size == 0 or not np.all(np.isfinite(arr)):
                raise ValidationError(f"axis {name!r} grid must be finite and 1-D")
            if arr.size > 1 and not np.all(np.diff(arr) > 0):
                raise ValidationError(f"axis {name!r} grid must be strictly increasing")
        needs_delta = quantity in ("mu_p", "nu_p", "G_s", "G_as")
        axis_names = {self.axis1[0]} | ({self.axis2[0]} if self.axis2 else set())
        if needs_delta and self.delta_hz is None and "delta_hz" not in axis_names:
            raise ValidationError(f"quantity {quantity!r} needs a detuning: "
                                  "sweep delta_hz or set a fixed delta_hz")

    @classmethod
    def from_dict(cls, raw: dict) -> "SweepSpec":
        try:
            base = load_params(raw["base"])
            axis1 = (raw["axis1"]["field"], raw["axis1"]["values_hz"])
            axis2 = None
            if raw.get("axis2"):
                axis2 = (raw["axis2"]["field"], raw["axis2"]["values_hz"])
            return cls(base=base, axis1=axis1, axis2=axis2,
                       quantity=raw["quantity"],
                       delta_hz=raw.get("delta_hz"))
        except KeyError as exc:
            raise ValidationError(f"sweep spec is missing key {exc}") from exc

    @classmethod
    def from_file(cls, path) -> "SweepSpec":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _axis_fields() -> set:
    return {f"{n}_hz" for n in ("omega_b", "omega_q", "delta_a", "chi", "g",
                                "gamma_a", "gamma_b", "gamma_q", "drive", "probe")}


def _apply_axis(params: SystemParams, name: str, value_hz: float) -> SystemParams:
    from .params import RAD_PER_US_PER_HZ

    field = name[:-3]  # strip _hz
    canonical = value_hz * RAD_PER_US_PER_HZ
    if field in ("drive", "probe"):
        return params.replace(**{field: complex(canonical)})
    return params.replace(**{field: canonical})


def _evaluate_point(params: SystemParams, quantity: str, delta: float | None):
    if quantity == "branch_count":
        return float(len(solve_steady_states(params)))
    branches = solve_steady_states(params)
    steady = select_branch(params, branches)
    if quantity == "photon_number":
        return steady.photon_number
    if quantity == "phonon_number":
        return steady.phonon_number
    response = compute_response(params, steady, delta)
    point = spectrum_point(params, steady, response)
    return getattr(point, quantity)


@dataclass(frozen=True)
class SweepResult:
    columns: tuple
    rows: list

    def to_csv(self, path: Path) -> None:
        write_csv(path, self.columns, self.rows)


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    """Evaluate the sweep grid in axis-major order.

    Individual point failures are recorded in the ``error`` column and
    never abort the sweep.  The output order is deterministic regardless
    of the worker pool size.
    """
    from .params import RAD_PER_US_PER_HZ

    if workers is None:
        workers = worker_count()
    ax1_name, ax1_values = spec.axis1[0], np.asarray(spec.axis1[1], dtype=float)
    if spec.axis2 is not None:
        ax2_name, ax2_values = spec.axis2[0], np.asarray(spec.axis2[1], dtype=float)
    else:
        ax2_name, ax2_values = None, np.array([math.nan])

    tasks = []
    for v1 in ax1_values:
        for v2 in ax2_values:
            tasks.append((float(v1), float(v2)))

    def evaluate(task):
        v1, v2 = task
        try:
            params = spec.base
            delta = (spec.delta_hz * RAD_PER_US_PER_HZ
                     if spec.delta_hz is not None else None)
            if ax1_name == "delta_hz":
                delta = v1 * RAD_PER_US_PER_HZ
            else:
                params = _apply_axis(params, ax1_name, v1)
            if ax2_name is not None:
                if ax2_name == "delta_hz":
                    delta = v2 * RAD_PER_US_PER_HZ
                else:
                    params = _apply_axis(params, ax2_name, v2)
            return _evaluate_point(params, spec.quantity, delta), ""
        except QomspecError as exc:
            return math.nan, f"{type(exc).__name__}: {exc}"

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(evaluate, tasks))
    else:
        results = [evaluate(t) for t in tasks]

    columns = [ax1_name] + ([ax2_name] if spec.axis2 is not None else []) \
        + [spec.quantity, "error"]
    rows = []
    for (v1, v2), (value, error) in zip(tasks, results):
        row = [v1] + ([v2] if spec.axis2 is not None else []) + [value, error]
        rows.append(row)
    return SweepResult(columns=tuple(columns), rows=rows)


# ---------------------------------------------------------------------------
# oracle cross-check

@dataclass(frozen=True)
class OracleComparison:
    """Formula-vs-integration comparison of the probe sidebands.

    ``details`` (kept only on request, the trajectories are large) holds
    one (trajectory, OracleResult) pair per detuning.
    """

    eps_ratio: float
    threshold: float
    deltas: tuple
    err_a_minus: tuple
    err_a_plus: tuple
    max_err_a_minus: float
    max_err_a_plus: float
    passed: bool
    transient_time: float
    backend: str
    details: tuple | None = None

    def to_dict(self) -> dict:
        return {"eps_ratio": self.eps_ratio,
                "threshold": self.threshold,
                "deltas": list(self.deltas),
                "err_a_minus": list(self.err_a_minus),
                "err_a_plus": list(self.err_a_plus),
                "max_err_a_minus": self.max_err_a_minus,
                "max_err_a_plus": self.max_err_a_plus,
                "passed": self.passed,
                "transient_time": self.transient_time,
                "backend": self.backend}


def oracle_check(params: SystemParams, delta_list, eps_ratio: float,
                 n_periods: int = 64, samples_per_period: int = 32,
                 n_efold: float = 25.0, rtol: float = 1e-11,
                 workers: int | None = None, backend: str | None = None,
                 keep_details: bool = False) -> OracleComparison:
    """Compare formula sidebands against time-domain harmonics at each detuning.

    The probe is set to ``eps_ratio`` times the drive (real phase).  The
    transient skip is sized from the slowest Jacobian eigenvalue of the
    operating branch (``n_efold`` e-folds); unstable operating points are
    refused, with the stability report attached to the error.  Passing
    threshold is the eps_ratio itself: first-order truncation makes the
    relative error shrink at least linearly in the probe strength.
    """
    if not 0 < eps_ratio <= 1e-2:
        raise ValidationError(f"eps_ratio must be in (0, 1e-2], got {eps_ratio}")
    deltas = np.asarray(delta_list, dtype=float)
    if deltas.ndim != 1 or deltas.size == 0 or np.any(deltas <= 0):
        raise ValidationError("delta_list must be 1-D with positive detunings")
    if workers is None:
        workers = worker_count()

    probe = complex(eps_ratio * abs(params.drive))
    if probe == 0:
        raise ValidationError("oracle check needs a nonzero drive")
    run_params = params.replace(probe=probe)

    branches = solve_steady_states(run_params)
    steady = select_branch(run_params, branches)
    stability = oracle_mod.classify_stability(run_params, steady)
    t_skip = oracle_mod.transient_time(run_params, steady, n_efold=n_efold)

    def one_delta(delta: float):
        period = 2.0 * math.pi / delta
        window = n_periods * period
        m = n_periods * samples_per_period
        dt = window / m
        t_end = t_skip + window
        t_eval = t_end - dt * np.arange(m)[::-1]
        traj = oracle_mod.integrate(run_params, t_end, delta=delta,
                                    t_eval=t_eval, rtol=rtol,
                                    backend=backend)
        harm = oracle_mod.extract_harmonics(traj, delta, n_periods)
        resp = compute_response(run_params, steady, delta)
        err_minus = (abs(resp.A_minus - harm.a_minus)
                     / max(abs(resp.A_minus), 1e-300))
        err_plus = (abs(resp.A_plus - harm.a_plus)
                    / max(abs(resp.A_plus), 1e-300))
        detail = (traj, oracle_mod.OracleResult(harmonics=harm,
                                                stability=stability)) \
            if keep_details else None
        return err_minus, err_plus, traj.backend, detail

    delta_values = [float(d) for d in deltas]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one_delta, delta_values))
    else:
        results = [one_delta(d) for d in delta_values]

    err_minus = tuple(r[0] for r in results)
    err_plus = tuple(r[1] for r in results)
    used_backend = results[0][2]
    threshold = eps_ratio  # linear-in-probe error budget
    max_minus = max(err_minus)
    max_plus = max(err_plus)
    return OracleComparison(eps_ratio=eps_ratio, threshold=threshold,
                            deltas=tuple(delta_values),
                            err_a_minus=err_minus, err_a_plus=err_plus,
                            max_err_a_minus=max_minus,
                            max_err_a_plus=max_plus,
                            passed=bool(max_minus <= threshold
                                        and max_plus <= threshold),
                            transient_time=t_skip,
                            backend=used_backend,
                            details=tuple(r[3] for r in results)
                            if keep_details else None)


# ---------------------------------------------------------------------------
# figure presets

def _preset_params(**overrides_hz) -> SystemParams:
    config = dict(_BASE_HZ)
    config.update(overrides_hz)
    return load_params(config)


def _spectrum_curve(out_dir: Path, stem: str, params: SystemParams,
                    grid_lo: float, grid_hi: float, grid_points: int) -> dict:
    grid = DetuningGrid.around_mechanical_resonance(params, grid_lo, grid_hi,
                                                    grid_points)
    points = spectrum_sweep(params, grid)
    path = out_dir / f"{stem}.csv"
    write_csv(path, SPECTRUM_COLUMNS, spectrum_rows(points, params.omega_b))
    report = window_analysis(points, params.gamma_a)
    return {"label": stem, "file": path.name,
            "params_hz": params.to_hz_dict(),
            "grid": {"lo_over_omega_b": grid_lo, "hi_over_omega_b": grid_hi,
                     "points": grid_points},
            "windows": report.to_dict()}


def _bistability_entry(out_dir: Path, stem: str, params: SystemParams,
                       mode: str, z0: float | None, x_grid,
                       omega_scan_hz) -> dict:
    from .params import RAD_PER_US_PER_HZ

    if mode == "photon":
        curve = photon_bistability_curve(params, x_grid, z0=z0)
    else:
        curve = phonon_bistability_curve(params, x_grid=x_grid, z0=z0)
    path = out_dir / f"{stem}.csv"
    write_csv(path, ("x", "omega_abs", "branch_id", "z0", "defect"),
              zip(curve.x_values, curve.omega_values, curve.branch_ids,
                  curve.z0_values, curve.defects))

    omega_grid = np.asarray(omega_scan_hz, dtype=float) * RAD_PER_US_PER_HZ
    counts = count_real_solutions(params, omega_grid)
    counts_path = out_dir / f"{stem}_counts.csv"
    write_csv(counts_path, ("omega_abs_hz", "branch_count"),
              zip(np.asarray(omega_scan_hz, dtype=float), counts))
    pattern = [int(counts[0])]
    for c in counts[1:]:
        if int(c) != pattern[-1]:
            pattern.append(int(c))
    return {"label": stem, "file": path.name, "counts_file": counts_path.name,
            "mode": mode, "z0_fixed": z0,
            "params_hz": params.to_hz_dict(),
            "monotonic": curve.is_monotonic(),
            "count_pattern": pattern}


def run_preset(name: str, out_dir, workers: int | None = None) -> Path:
    """Emit the dataset files for one named preset; returns the manifest path.

    Each preset writes one CSV per curve plus ``<name>_manifest.json``
    recording the exact parameters (reloadable via load_params) and, for
    spectra, the transparency-window analysis.
    """
    if name not in PRESET_NAMES:
        raise ValidationError(f"unknown preset {name!r}; expected one of "
                              f"{PRESET_NAMES}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    curves = []
    notes = {}

    if name == "fig2":
        params = _preset_params(delta_a_hz=50e6)
        x_grid = np.linspace(1e-6, 30.0, 1200)
        omega_scan = np.linspace(1e6, 150e6, 150)
        curves.append(_bistability_entry(out_dir, "fig2_photon", params,
                                         "photon", -0.99, x_grid, omega_scan))
        notes["layout_hint"] = "plot omega_abs/(2e-6*pi) on x, x (=|A0|^2) on y"
    elif name == "fig3":
        params = _preset_params(delta_a_hz=20e6)
        x_grid = np.linspace(1e-6, 15.0, 1200)
        omega_scan = np.linspace(1e6, 60e6, 120)
        curves.append(_bistability_entry(out_dir, "fig3_phonon", params,
                                         "phonon", -0.99, x_grid, omega_scan))
        notes["layout_hint"] = "plot omega_abs/(2e-6*pi) on x, x (=|B0|^2) on y"
    elif name in ("fig5", "fig6"):
        for g_hz, label in ((0.0, "g0"), (10e6, "g10MHz")):
            params = _preset_params(delta_a_hz=100e6, g_hz=g_hz)
            curves.append(_spectrum_curve(out_dir, f"{name}_{label}", params,
                                          0.8, 1.2, 2001))
        notes["layout_hint"] = ("mu_p/nu_p vs delta_over_omega_b" if name == "fig5"
                                else "G_s/G_as vs delta_over_omega_b")
    elif name in ("fig7", "fig8"):
        for wq_mhz in (100, 80, 120, 10, 200):
            params = _preset_params(delta_a_hz=100e6, omega_q_hz=wq_mhz * 1e6)
            curves.append(_spectrum_curve(out_dir, f"{name}_wq{wq_mhz}MHz",
                                          params, 0.7, 1.3, 3001))
        notes["window_counts"] = {c["label"]: c["windows"]["count"] for c in curves}
        notes["layout_hint"] = ("mu_p vs delta_over_omega_b, one panel per "
                                "omega_q" if name == "fig7" else
                                "nu_p vs delta_over_omega_b, one panel per omega_q")
    elif name == "fig9":
        for wq_mhz in (100, 80, 120):
            params = _preset_params(delta_a_hz=100e6, omega_q_hz=wq_mhz * 1e6)
            curves.append(_spectrum_curve(out_dir, f"fig9_wq{wq_mhz}MHz",
                                          params, 0.7, 1.3, 3001))
        notes["layout_hint"] = "G_s/G_as vs delta_over_omega_b, three curves"

    manifest = {"preset": name, "curves": curves}
    manifest.update(notes)
    manifest_path = out_dir / f"{name}_manifest.json"
    write_json(manifest_path, manifest)
    return manifest_path
