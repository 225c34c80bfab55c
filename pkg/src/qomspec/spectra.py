"""Input-output observables of the probe: absorption, dispersion, and the
Stokes / anti-Stokes output powers.

The cavity output decomposes into a drive-frequency component, a
probe-frequency (Stokes) component and a four-wave-mixing (anti-Stokes)
component.  The normalized probe output eps_T = 2*gamma_a*A_minus/probe
carries the transparency physics: its real part is the absorption, its
imaginary part the dispersion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (BranchSelectionError, GridError, ParamError,
                     UnstableOperatingPointError, ValidationError)
from .params import DetuningGrid, SystemParams
from .response import ResponseCoefficients, compute_response
from .steady import SteadyState, solve_steady_states

# local minima flatter than this are treated as plateaus, not windows
_PLATEAU_TOL = 1e-9


@dataclass(frozen=True)
class SpectrumPoint:
    """Probe observables at a single probe-drive detuning."""

    delta: float
    A_d: complex
    A_s: complex
    A_as: complex
    eps_T: complex
    mu_p: float
    nu_p: float
    G_s: float
    G_as: float


@dataclass(frozen=True)
class WindowReport:
    """Transparency windows found in an absorption trace."""

    count: int
    positions: tuple
    depths: tuple
    splitting: float | None

    def to_dict(self) -> dict:
        return {"count": self.count,
                "positions": list(self.positions),
                "depths": list(self.depths),
                "splitting": self.splitting}


def spectrum_point(params: SystemParams, steady: SteadyState,
                   response: ResponseCoefficients) -> SpectrumPoint:
    """Turn one sideband evaluation into the measurable probe outputs.

    ``response`` must have been built for the same (params, steady).
    The probe amplitude must be nonzero: all outputs are normalized to it.
    """
    eps = params.probe
    if eps == 0:
        raise ValidationError("probe amplitude is zero; normalized outputs "
                              "are undefined")
    root = math.sqrt(2.0 * params.gamma_a)
    a_d = root * steady.A0 - params.drive / root
    a_s = root * response.A_minus / eps - 1.0 / root
    a_as = root * response.A_plus / eps.conjugate()
    eps_t = 2.0 * params.gamma_a * response.A_minus / eps
    return SpectrumPoint(delta=response.delta,
                         A_d=a_d, A_s=a_s, A_as=a_as, eps_T=eps_t,
                         mu_p=eps_t.real, nu_p=eps_t.imag,
                         G_s=2.0 * params.gamma_a * abs(a_s) ** 2,
                         G_as=2.0 * params.gamma_a * abs(a_as) ** 2)


def select_branch(params: SystemParams, branches: list[SteadyState],
                  branch: int | None = None) -> SteadyState:
    """Pick the operating branch for spectra.

    With one stable branch that branch is used.  Under bistability the
    caller must pass an explicit ``branch`` index (position in the list
    sorted by photon number); choosing silently would hide physics.
    """
    from .oracle import classify_stability  # deferred: oracle imports steady

    if branch is not None:
        if not 0 <= branch < len(branches):
            raise BranchSelectionError(
                f"branch index {branch} out of range (found {len(branches)})")
        return branches[branch]
    reports = [classify_stability(params, s) for s in branches]
    stable = [i for i, r in enumerate(reports) if r.stable]
    if len(stable) == 1:
        return branches[stable[0]]
    if not stable:
        raise UnstableOperatingPointError(
            "no stable steady branch at these parameters",
            report=reports[0] if reports else None)
    raise BranchSelectionError(
        f"{len(stable)} stable branches (of {len(branches)}); pass an "
        f"explicit branch index from {stable}")


def spectrum_sweep(params: SystemParams, grid, branch: int | None = None,
                   displacement_shift: str = "real") -> list[SpectrumPoint]:
    """Full probe spectrum over a detuning grid.

    The steady state does not depend on the probe detuning, so it is
    solved once and reused for every point.
    """
    deltas = grid.values if isinstance(grid, DetuningGrid) else np.asarray(grid, dtype=float)
    branches = solve_steady_states(params)
    steady = select_branch(params, branches, branch)
    points = []
    for delta in deltas:
        response = compute_response(params, steady, float(delta),
                                    displacement_shift=displacement_shift)
        points.append(spectrum_point(params, steady, response))
    return points


def window_analysis(points: list[SpectrumPoint], gamma_a: float) -> WindowReport:
    """Locate transparency windows (local minima of the absorption).

    Needs at least three points and a grid fine enough to resolve
    cavity-linewidth features (spacing below gamma_a/10).  Minima closer
    than gamma_a/100 merge into one window (the deeper survives).
    """
    if len(points) < 3:
        raise GridError("window analysis needs at least 3 spectrum points")
    deltas = np.array([p.delta for p in points])
    mu = np.array([p.mu_p for p in points])
    spacing = np.max(np.diff(deltas))
    if spacing >= gamma_a / 10.0:
        raise GridError(f"grid too coarse for window analysis: spacing "
                        f"{spacing:g} exceeds gamma_a/10 = {gamma_a / 10:g}")

    minima = []
    for i in range(1, len(mu) - 1):
        if mu[i] + _PLATEAU_TOL < mu[i - 1] and mu[i] + _PLATEAU_TOL < mu[i + 1]:
            minima.append(i)

    merged: list[int] = []
    for i in minima:
        if merged and deltas[i] - deltas[merged[-1]] < gamma_a / 100.0:
            if mu[i] < mu[merged[-1]]:
                merged[-1] = i
        else:
            merged.append(i)

    positions = tuple(float(deltas[i]) for i in merged)
    depths = tuple(float(mu[i]) for i in merged)
    splitting = positions[1] - positions[0] if len(merged) == 2 else None
    return WindowReport(count=len(merged), positions=positions,
                        depths=depths, splitting=splitting)


def spectrum_rows(points: list[SpectrumPoint], omega_b: float):
    """CSV rows: delta, delta/omega_b, mu_p, nu_p, G_s, G_as, Re/Im eps_T."""
    if omega_b <= 0:
        raise ParamError("omega_b must be positive")
    for p in points:
        yield (p.delta, p.delta / omega_b, p.mu_p, p.nu_p, p.G_s, p.G_as,
               p.eps_T.real, p.eps_T.imag)


SPECTRUM_COLUMNS = ("delta", "delta_over_omega_b", "mu_p", "nu_p",
                    "G_s", "G_as", "re_eps_T", "im_eps_T")
