"""Independent time-domain validation path.

Everything the closed-form modules predict can be checked here the hard
way: integrate the mean-field equations directly (with the explicit
oscillating probe term), project the settled trajectory onto the three
lines {0, +delta, -delta} by direct quadrature, and classify fixed-point
stability from the analytic Jacobian.  Direct quadrature rather than an
FFT so the window can align exactly with an arbitrary detuning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernel
from .errors import (DivergenceError, GridError, StiffnessError,
                     UnstableOperatingPointError, ValidationError,
                     WindowAlignmentError)
from .params import SystemParams
from .steady import SteadyState

_VARIABLES = ("a", "b", "s_minus", "s_z")


@dataclass(frozen=True)
class MeanFieldState:
    """Point in the 7-real-dimensional mean-field phase space."""

    a: complex = 0j
    b: complex = 0j
    s_minus: complex = 0j
    s_z: float = -1.0

    @classmethod
    def trivial(cls) -> "MeanFieldState":
        """Everything empty, qubit in the ground state."""
        return cls()

    @classmethod
    def from_steady(cls, steady: SteadyState) -> "MeanFieldState":
        return cls(a=steady.A0, b=steady.B0, s_minus=steady.L0, s_z=steady.Z0)

    def as_vector(self) -> np.ndarray:
        return np.array([self.a.real, self.a.imag, self.b.real, self.b.imag,
                         self.s_minus.real, self.s_minus.imag, self.s_z])


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution of the mean-field equations."""

    t: np.ndarray
    a: np.ndarray
    b: np.ndarray
    s_minus: np.ndarray
    s_z: np.ndarray
    n_steps: int
    n_rejected: int
    backend: str

    def final_state(self) -> MeanFieldState:
        return MeanFieldState(a=complex(self.a[-1]), b=complex(self.b[-1]),
                              s_minus=complex(self.s_minus[-1]),
                              s_z=float(self.s_z[-1]))

    def variable(self, name: str) -> np.ndarray:
        if name not in _VARIABLES:
            raise ValidationError(f"unknown variable {name!r}")
        return getattr(self, name)


@dataclass(frozen=True)
class Harmonics:
    """Per-variable complex amplitudes on the lines {0, +delta, -delta}.

    The naming mirrors the sideband expansion: ``a_minus`` multiplies
    exp(-i*delta*t) in the cavity variable, and so on.  ``residual_power``
    is the per-variable mean-square power left after removing the three
    lines; ``line_power`` maps each variable to its (dc, plus, minus)
    powers for normalization.
    """

    delta: float
    a0: complex
    a_plus: complex
    a_minus: complex
    b0: complex
    b_plus: complex
    b_minus: complex
    l0: complex
    l_plus: complex
    l_minus: complex
    z0: complex
    z_plus: complex
    z_minus: complex
    residual_power: dict = field(default_factory=dict)
    line_power: dict = field(default_factory=dict)

    def leak_fraction(self, name: str, reference: str = "sidebands") -> float:
        """Residual power relative to the sideband (or total) line power."""
        p0, pp, pm = self.line_power[name]
        ref = pp + pm if reference == "sidebands" else p0 + pp + pm
        return self.residual_power[name] / max(ref, 1e-300)


@dataclass(frozen=True)
class StabilityReport:
    """Jacobian spectrum of a fixed point of the drive-only flow."""

    eigenvalues: np.ndarray
    stable: bool
    max_real_part: float

    def slowest_rate(self) -> float:
        """Decay rate of the most slowly relaxing mode (positive if stable)."""
        return -self.max_real_part

    def to_dict(self) -> dict:
        return {"eigenvalues": [[ev.real, ev.imag] for ev in self.eigenvalues],
                "stable": bool(self.stable),
                "max_real_part": self.max_real_part}


@dataclass(frozen=True)
class OracleResult:
    """Harmonic extraction bundled with the fixed-point stability data."""

    harmonics: Harmonics
    stability: StabilityReport | None = None

    def to_dict(self) -> dict:
        h = self.harmonics
        out = {"delta": h.delta}
        for name in ("a0", "a_plus", "a_minus", "b0", "b_plus", "b_minus",
                     "l0", "l_plus", "l_minus", "z0", "z_plus", "z_minus"):
            v = getattr(h, name)
            out[name] = [v.real, v.imag]
        out["residual_power"] = dict(h.residual_power)
        out["line_power"] = {k: list(v) for k, v in h.line_power.items()}
        if self.stability is not None:
            out.update(self.stability.to_dict())
        return out


def mean_field_rhs(params: SystemParams, t: float, y: np.ndarray,
                   delta: float = 0.0, include_probe: bool = True) -> np.ndarray:
    """Real 7-vector field of the mean-field equations (reference version).

    Coordinates (Re a, Im a, Re b, Im b, Re L, Im L, z).  Used for
    finite-difference validation of the analytic Jacobian; the kernels
    implement the same field in their own arithmetic.
    """
    a = y[0] + 1j * y[1]
    b = y[2] + 1j * y[3]
    l = y[4] + 1j * y[5]
    z = y[6]
    da = (-(params.gamma_a + 1j * params.delta_a) * a
          + 1j * params.chi * a * (2.0 * b.real) + params.drive)
    if include_probe and params.probe != 0:
        da += params.probe * np.exp(-1j * delta * t)
    db = (-(params.gamma_b + 1j * params.omega_b) * b
          + 1j * params.chi * abs(a) ** 2 - 1j * params.g * l)
    dl = -(params.gamma_q / 2 + 1j * params.omega_q) * l + 1j * params.g * b * z
    dz = -params.gamma_q * (z + 1.0) + 4.0 * params.g * (b * l.conjugate()).imag
    return np.array([da.real, da.imag, db.real, db.imag, dl.real, dl.imag, dz])


def integrate(params: SystemParams, t_end: float, *, delta: float = 0.0,
              initial: MeanFieldState | None = None,
              dt_max: float | None = None, t_eval=None,
              rtol: float = 1e-11, atol: float = 1e-14,
              include_probe: bool = True,
              backend: str | None = None) -> Trajectory:
    """Adaptive integration of the mean-field equations over [0, t_end].

    The probe enters as an explicit drive oscillating at the probe-drive
    detuning ``delta``.  ``t_eval`` lists the times (ascending, within
    [0, t_end]) at which the state is returned; the stepper lands on each
    exactly, so no interpolation error enters harmonic extraction.  With
    ``t_eval=None`` a uniform 1000-point sampling is used.

    Raises :class:`StiffnessError` on step-size underflow and
    :class:`DivergenceError` when |a| exceeds one million times the drive
    scale (the signature of an unstable branch).
    """
    if not (isinstance(t_end, (int, float)) and math.isfinite(t_end) and t_end > 0):
        raise ValidationError(f"t_end must be positive and finite, got {t_end!r}")
    if initial is None:
        initial = MeanFieldState.trivial()
    if t_eval is None:
        t_eval = np.linspace(0.0, t_end, 1000)
    t_eval = np.ascontiguousarray(t_eval, dtype=float)
    if t_eval.ndim != 1:
        raise GridError("t_eval must be one-dimensional")
    if t_eval.size and (np.any(np.diff(t_eval) <= 0)
                        or t_eval[0] < 0 or t_eval[-1] > t_end * (1 + 1e-12)):
        raise GridError("t_eval must be strictly increasing within [0, t_end]")

    kern = _kernel.get_kernel(backend)
    eps = params.probe if include_probe else 0j
    pars = (params.gamma_a, params.delta_a, params.chi,
            params.drive.real, params.drive.imag,
            params.gamma_b, params.omega_b, params.g,
            params.gamma_q, params.omega_q,
            eps.real, eps.imag, float(delta))
    y0 = tuple(initial.as_vector())
    amp_scale = max((abs(params.drive) + abs(eps)) / params.gamma_a,
                    abs(initial.a), abs(initial.b), 1.0)
    out = np.empty((t_eval.size, 7), dtype=float)

    status, n_steps, n_rejected, t_reached = kern.integrate_mean_field(
        pars, y0, 0.0, float(t_end), float(rtol), float(atol),
        float(dt_max) if dt_max else math.inf, 1e6 * amp_scale, t_eval, out)

    if status == _kernel.STATUS_STEP_UNDERFLOW:
        raise StiffnessError(f"step size underflow at t={t_reached:g} "
                             "(stiffness failure)")
    if status == _kernel.STATUS_DIVERGED:
        raise DivergenceError(f"|a| exceeded 1e6 x drive scale at t={t_reached:g}; "
                              "the integrated branch is unstable")

    return Trajectory(t=t_eval,
                      a=out[:, 0] + 1j * out[:, 1],
                      b=out[:, 2] + 1j * out[:, 3],
                      s_minus=out[:, 4] + 1j * out[:, 5],
                      s_z=out[:, 6].copy(),
                      n_steps=n_steps, n_rejected=n_rejected,
                      backend=kern.BACKEND_NAME)


def extract_harmonics(trajectory: Trajectory, delta: float,
                      n_periods: int) -> Harmonics:
    """Project the last ``n_periods`` probe periods onto {1, e^{-idt}, e^{+idt}}.

    The sampling inside that window must be uniform and the window must
    cover an integer number of periods; otherwise the quadrature is
    biased and a :class:`WindowAlignmentError` is raised.
    """
    if delta <= 0:
        raise ValidationError("harmonic extraction needs a positive detuning")
    if n_periods < 1:
        raise ValidationError("n_periods must be at least 1")
    period = 2.0 * math.pi / delta
    window = n_periods * period
    t = trajectory.t
    if t.size < 4:
        raise WindowAlignmentError("trajectory has too few samples")

    dt = t[-1] - t[-2]
    # samples covering [t_end - window + dt, t_end]: m samples at spacing dt,
    # i.e. the half-open window of length m*dt == window
    m = int(round(window / dt))
    if m < 2 or m > t.size:
        raise WindowAlignmentError(
            f"window of {n_periods} periods needs {m} samples at spacing "
            f"{dt:g}; trajectory provides {t.size}")
    idx = slice(t.size - m, t.size)
    tw = t[idx]
    spacing = np.diff(tw)
    if not np.allclose(spacing, dt, rtol=1e-9, atol=0):
        raise WindowAlignmentError("extraction window sampling is not uniform")
    covered = m * dt
    if abs(covered - window) > 1e-9 * window:
        raise WindowAlignmentError(
            f"window covers {covered:g}, expected {window:g} "
            "(non-integer period count)")

    phase = np.exp(1j * delta * tw)
    values = {}
    residual_power = {}
    line_power = {}
    for name in _VARIABLES:
        y = trajectory.variable(name)[idx]
        c0 = np.mean(y)
        c_minus = np.mean(y * phase)
        c_plus = np.mean(y * phase.conjugate())
        recon = c0 + c_plus * phase + c_minus * phase.conjugate()
        residual_power[name] = float(np.mean(np.abs(y - recon) ** 2))
        line_power[name] = (float(abs(c0) ** 2), float(abs(c_plus) ** 2),
                            float(abs(c_minus) ** 2))
        values[name] = (complex(c0), complex(c_plus), complex(c_minus))

    return Harmonics(
        delta=float(delta),
        a0=values["a"][0], a_plus=values["a"][1], a_minus=values["a"][2],
        b0=values["b"][0], b_plus=values["b"][1], b_minus=values["b"][2],
        l0=values["s_minus"][0], l_plus=values["s_minus"][1],
        l_minus=values["s_minus"][2],
        z0=values["s_z"][0], z_plus=values["s_z"][1], z_minus=values["s_z"][2],
        residual_power=residual_power, line_power=line_power)


def mean_field_jacobian(params: SystemParams,
                        state: MeanFieldState) -> np.ndarray:
    """Analytic 7x7 Jacobian of the drive-only flow at ``state``.

    Real coordinates ordered (Re a, Im a, Re b, Im b, Re L, Im L, z).
    """
    a, b, l, z = state.a, state.b, state.s_minus, state.s_z
    chi, g = params.chi, params.g
    jac = np.zeros((7, 7))

    def put_linear(row, col, c):
        # 2x2 block of a complex-linear dependence f = c*w + ...
        jac[row, col] = c.real
        jac[row, col + 1] = -c.imag
        jac[row + 1, col] = c.imag
        jac[row + 1, col + 1] = c.real

    # cavity: f_a = -(gamma_a + i delta_a) a + 2i chi a Re(b) + drive
    put_linear(0, 0, -(params.gamma_a + 1j * params.delta_a) + 2j * chi * b.real)
    col = 2j * chi * a  # Re(b) dependence only
    jac[0, 2] = col.real
    jac[1, 2] = col.imag

    # mechanics: f_b = -(gamma_b + i omega_b) b + i chi |a|^2 - i g L
    col = 2j * chi * a.real
    jac[2, 0] = col.real
    jac[3, 0] = col.imag
    col = 2j * chi * a.imag
    jac[2, 1] = col.real
    jac[3, 1] = col.imag
    put_linear(2, 2, -(params.gamma_b + 1j * params.omega_b))
    put_linear(2, 4, -1j * g)

    # coherence: f_L = -(gamma_q/2 + i omega_q) L + i g b z
    put_linear(4, 2, 1j * g * z)
    put_linear(4, 4, -(params.gamma_q / 2 + 1j * params.omega_q))
    col = 1j * g * b
    jac[4, 6] = col.real
    jac[5, 6] = col.imag

    # inversion: f_z = -gamma_q (z+1) + 4 g (Im b Re L - Re b Im L)
    jac[6, 2] = -4.0 * g * l.imag
    jac[6, 3] = 4.0 * g * l.real
    jac[6, 4] = 4.0 * g * b.imag
    jac[6, 5] = -4.0 * g * b.real
    jac[6, 6] = -params.gamma_q
    return jac


def classify_stability(params: SystemParams,
                       steady: SteadyState) -> StabilityReport:
    """Eigenvalues of the analytic Jacobian at a steady branch."""
    jac = mean_field_jacobian(params, MeanFieldState.from_steady(steady))
    eigenvalues = np.linalg.eigvals(jac)
    max_real = float(np.max(eigenvalues.real))
    return StabilityReport(eigenvalues=eigenvalues,
                           stable=bool(max_real < 0.0),
                           max_real_part=max_real)


def transient_time(params: SystemParams, steady: SteadyState,
                   n_efold: float = 25.0) -> float:
    """Time for the slowest Jacobian mode to decay by ``n_efold`` e-folds.

    Refuses unstable fixed points: a transient toward them never ends.
    """
    report = classify_stability(params, steady)
    if not report.stable:
        raise UnstableOperatingPointError(
            "operating point is unstable "
            f"(max eigenvalue real part {report.max_real_part:g})",
            report=report)
    return n_efold / report.slowest_rate()


def trajectory_to_rows(trajectory: Trajectory):
    """Rows (t, re/im of each variable) for CSV export."""
    for i in range(trajectory.t.size):
        yield (trajectory.t[i],
               trajectory.a[i].real, trajectory.a[i].imag,
               trajectory.b[i].real, trajectory.b[i].imag,
               trajectory.s_minus[i].real, trajectory.s_minus[i].imag,
               trajectory.s_z[i])
