"""Drive-only steady states and the photon/phonon bistability curves.

The steady state is found by scanning a single real unknown, the cavity
photon number x = |A0|^2.  For a trial x the qubit inversion closes
through a damped 1-D fixed point, the mechanical amplitude follows in
closed form, and the remaining scalar consistency equation

    x * (gamma_a^2 + (delta_a - 2*chi*Re B0(x))^2) = |drive|^2

is bracketed on a grid and each sign change is refined by bisection.
This handles the multivalued (bistable) regime uniformly, with or
without a self-consistent inversion.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BracketRangeError, FixedPointError, ParamError
from .params import SystemParams

# merge roots closer than this relative distance in x
_ROOT_MERGE_REL = 1e-8
# relative bisection tolerance on x
_BISECT_REL = 1e-12
_FIXED_POINT_TOL = 1e-15
_FIXED_POINT_MAX_ITER = 200
_FIXED_POINT_DAMPING = 0.5


@dataclass(frozen=True)
class SteadyState:
    """One drive-only operating point of the hybrid system.

    ``residual`` is the largest defect obtained by substituting the four
    amplitudes back into their defining stationarity relations (canonical
    units); converged branches sit far below 1e-10.
    """

    A0: complex
    B0: complex
    L0: complex
    Z0: float
    residual: float

    @property
    def photon_number(self) -> float:
        return abs(self.A0) ** 2

    @property
    def phonon_number(self) -> float:
        return abs(self.B0) ** 2


@dataclass(frozen=True)
class BistabilityCoefficients:
    """Real auxiliaries of the closed-form drive-vs-amplitude curves."""

    eps1: float
    eps2: float
    eps3: float
    eps4: float
    eps5: float
    z0_fixed: float

    def __post_init__(self):
        if not self.eps3 > 0:
            raise ParamError("eps3 must be positive")


@dataclass(frozen=True)
class BistabilityCurve:
    """Sampled |drive|(amplitude) curve with monotone-branch labels.

    ``x_values`` holds |A0|^2 in photon mode and |B0|^2 in phonon mode;
    ``defects`` is the relative imaginary leakage of the phonon-mode
    right-hand side (identically zero for the photon curve).
    """

    mode: str
    x_values: np.ndarray
    omega_values: np.ndarray
    branch_ids: np.ndarray
    z0_values: np.ndarray
    defects: np.ndarray

    def is_monotonic(self) -> bool:
        d = np.diff(self.omega_values)
        return bool(np.all(d >= 0) or np.all(d <= 0))


def _sigma_denominator(params: SystemParams) -> complex:
    # 2*omega_q - i*gamma_q, the qubit-coherence response denominator
    return 2.0 * params.omega_q - 1j * params.gamma_q


def _inversion_map(params: SystemParams, x, z):
    """One application of the self-consistency map z -> T(z) at photon number x."""
    s = params.gamma_q ** 2 + 4.0 * params.omega_q ** 2
    b0 = _mech_amplitude(params, x, z)
    return -s / (s + 8.0 * params.g ** 2 * np.abs(b0) ** 2)


def _mech_amplitude(params: SystemParams, x, z):
    """Mechanical amplitude for photon number x at inversion z."""
    den = (params.omega_b - 1j * params.gamma_b
           + 2.0 * params.g ** 2 * z / _sigma_denominator(params))
    return params.chi * x / den


def solve_inversion(params: SystemParams, x):
    """Damped fixed point for the inversion on [-1, 0), starting from -1.

    Works elementwise on arrays.  The map sends [-1, 0) into itself, so the
    iteration stays contained; 0.5 damping keeps it contractive.
    """
    x = np.asarray(x, dtype=float)
    z = np.full(x.shape, -1.0)
    for _ in range(_FIXED_POINT_MAX_ITER):
        t = _inversion_map(params, x, z)
        dz = t - z
        z = z + _FIXED_POINT_DAMPING * dz
        if np.max(np.abs(dz)) <= _FIXED_POINT_TOL:
            return z if z.shape else float(z)
    raise FixedPointError(
        "inversion fixed point did not converge within "
        f"{_FIXED_POINT_MAX_ITER} iterations (pathological parameters?)")


def _consistency(params: SystemParams, x):
    """Scalar (or vectorized) drive-balance defect G(x)."""
    z = solve_inversion(params, x)
    b0 = _mech_amplitude(params, x, z)
    pulled = params.delta_a - 2.0 * params.chi * np.real(b0)
    return x * (params.gamma_a ** 2 + pulled ** 2) - abs(params.drive) ** 2


def _state_from_x(params: SystemParams, x: float) -> SteadyState:
    z0 = float(solve_inversion(params, x))
    b0 = complex(_mech_amplitude(params, x, z0))
    l0 = 2.0 * params.g * b0 * z0 / _sigma_denominator(params)
    a0 = params.drive / (params.gamma_a + 1j * (params.delta_a - 2.0 * params.chi * b0.real))
    return SteadyState(A0=a0, B0=b0, L0=l0, Z0=z0,
                       residual=_residual(params, a0, b0, l0, z0))


def _residual(params: SystemParams, a0: complex, b0: complex,
              l0: complex, z0: float) -> float:
    s = params.gamma_q ** 2 + 4.0 * params.omega_q ** 2
    d_b = abs(b0 - (params.chi * abs(a0) ** 2 - params.g * l0)
              / (params.omega_b - 1j * params.gamma_b))
    d_l = abs(l0 - 2.0 * params.g * b0 * z0 / _sigma_denominator(params))
    d_z = abs(z0 + s / (s + 8.0 * params.g ** 2 * abs(b0) ** 2))
    d_a = abs(a0 * (params.gamma_a + 1j * (params.delta_a - 2.0 * params.chi * b0.real))
              - params.drive) / max(1.0, abs(params.drive))
    return max(d_b, d_l, d_z, d_a)


def _default_x_grid(params: SystemParams, n_grid: int, x_max: float) -> np.ndarray:
    # linear below x=1 for the weak-drive branch, logarithmic above for reach
    if x_max <= 1.0:
        return np.linspace(0.0, x_max, n_grid)
    n_lin = n_grid // 2
    lin = np.linspace(0.0, 1.0, n_lin, endpoint=False)
    log = np.geomspace(1.0, x_max, n_grid - n_lin)
    return np.concatenate([lin, log])


def solve_steady_states(params: SystemParams, x_max: float | None = None,
                        n_grid: int = 2000) -> list[SteadyState]:
    """Every real steady branch, sorted by photon number.

    ``x_max`` bounds the scan in |A0|^2; the default 4*|drive|^2/gamma_a^2
    always brackets the topmost root.  Raises :class:`BracketRangeError`
    if a caller-supplied bound is too small.
    """
    drive_sq = abs(params.drive) ** 2
    if drive_sq == 0.0:
        return [SteadyState(A0=0j, B0=0j, L0=0j, Z0=-1.0, residual=0.0)]

    if x_max is None:
        x_max = 4.0 * drive_sq / params.gamma_a ** 2
    elif x_max <= 0:
        raise ParamError("x_max must be positive")

    grid = _default_x_grid(params, n_grid, x_max)
    values = _consistency(params, grid)
    if values[-1] < 0.0:
        raise BracketRangeError(
            f"no upper bracket below x_max={x_max:g}; widen the x range")

    roots: list[float] = []
    for i in range(grid.size - 1):
        gi, gj = values[i], values[i + 1]
        if gi == 0.0:
            roots.append(float(grid[i]))
        elif gi * gj < 0.0:
            roots.append(_bisect(params, float(grid[i]), float(grid[i + 1]), gi))
    if values[-1] == 0.0:
        roots.append(float(grid[-1]))

    merged: list[float] = []
    for r in sorted(roots):
        if merged and abs(r - merged[-1]) <= _ROOT_MERGE_REL * max(abs(r), 1e-300):
            continue
        merged.append(r)
    return [_state_from_x(params, r) for r in merged]


def _bisect(params: SystemParams, lo: float, hi: float, g_lo: float) -> float:
    while hi - lo > _BISECT_REL * max(hi, 1e-300):
        mid = 0.5 * (lo + hi)
        g_mid = float(_consistency(params, mid))
        if g_mid == 0.0:
            return mid
        if g_lo * g_mid < 0.0:
            hi = mid
        else:
            lo, g_lo = mid, g_mid
    return 0.5 * (lo + hi)


def bistability_coefficients(params: SystemParams, z0: float,
                             aux_damping: str = "qubit") -> BistabilityCoefficients:
    """Auxiliary coefficients of the closed-form bistability curves.

    ``aux_damping`` selects which linewidth enters the qubit-dressing
    auxiliaries: "qubit" (the reading consistent with
    :func:`solve_steady_states`, see README) or "cavity" (alternative
    reading, kept for comparison).
    """
    if aux_damping == "qubit":
        rate = params.gamma_q
    elif aux_damping == "cavity":
        rate = params.gamma_a
    else:
        raise ParamError(f"aux_damping must be 'qubit' or 'cavity', got {aux_damping!r}")
    s = rate ** 2 + 4.0 * params.omega_q ** 2
    g2z = params.g ** 2 * z0
    eps1 = params.gamma_b * s - 2.0 * rate * g2z
    eps2 = params.omega_b * s + 4.0 * params.omega_q * g2z
    return BistabilityCoefficients(eps1=eps1, eps2=eps2, eps3=s,
                                   eps4=eps1, eps5=eps2, z0_fixed=z0)


def _curve_inversion(params: SystemParams, x: np.ndarray, z0: float | None,
                     aux_damping: str) -> np.ndarray:
    """Inversion used along a curve: fixed value or per-point fixed point."""
    if z0 is not None:
        if not -1.0 <= z0 < 0.0:
            raise ParamError(f"fixed inversion must lie in [-1, 0), got {z0}")
        return np.full(x.shape, float(z0))
    # self-consistent: iterate with the mechanical amplitude of this curve's
    # own auxiliary chain, so either reading stays internally consistent
    z = np.full(x.shape, -1.0)
    sq = params.gamma_q ** 2 + 4.0 * params.omega_q ** 2
    for _ in range(_FIXED_POINT_MAX_ITER):
        b0 = _curve_mech_amplitude(params, x, z, aux_damping)
        t = -sq / (sq + 8.0 * params.g ** 2 * np.abs(b0) ** 2)
        dz = t - z
        z = z + _FIXED_POINT_DAMPING * dz
        if np.max(np.abs(dz)) <= _FIXED_POINT_TOL:
            return z
    raise FixedPointError("inversion fixed point did not converge along the curve")


def _curve_mech_amplitude(params: SystemParams, x, z, aux_damping: str):
    """Mechanical amplitude from the auxiliary chain, parameterized by real x."""
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    e1 = np.empty_like(x)
    e2 = np.empty_like(x)
    e3 = np.empty_like(x)
    for i in np.ndindex(x.shape):
        c = bistability_coefficients(params, float(z[i]), aux_damping)
        e1[i], e2[i], e3[i] = c.eps4, c.eps5, c.eps3
    return params.chi * x * e3 / (e2 - 1j * e1)


def photon_bistability_curve(params: SystemParams, x_grid,
                             z0: float | None = None,
                             aux_damping: str = "qubit") -> BistabilityCurve:
    """Closed-form |drive| as a function of photon number x = |A0|^2.

    ``z0=None`` recomputes the inversion self-consistently at every x;
    a float holds it fixed along the curve.
    """
    x = np.asarray(x_grid, dtype=float)
    _check_grid(x, "x_grid", nonneg=True)
    z = _curve_inversion(params, x, z0, aux_damping)

    omega = np.empty_like(x)
    for i in np.ndindex(x.shape):
        c = bistability_coefficients(params, float(z[i]), aux_damping)
        pull = (2.0 * params.chi ** 2 * c.eps2 * x[i] * c.eps3
                / (c.eps1 ** 2 + c.eps2 ** 2))
        omega[i] = np.sqrt(x[i]) * np.sqrt(params.gamma_a ** 2
                                           + (params.delta_a - pull) ** 2)
    return BistabilityCurve(mode="photon", x_values=x, omega_values=omega,
                            branch_ids=_monotone_labels(omega),
                            z0_values=z, defects=np.zeros_like(x))


def phonon_bistability_curve(params: SystemParams, x_grid=None,
                             b0_grid=None, z0: float | None = None,
                             aux_damping: str = "qubit") -> BistabilityCurve:
    """Closed-form |drive|^2 against the mechanical amplitude.

    The physical one-parameter family of mechanical amplitudes is generated
    from a real grid of photon numbers ``x_grid`` through the auxiliary
    chain; passing explicit complex samples via ``b0_grid`` skips that and
    reports how far they sit from the curve (relative imaginary defect).
    """
    if (x_grid is None) == (b0_grid is None):
        raise ParamError("pass exactly one of x_grid or b0_grid")

    if b0_grid is None:
        x = np.asarray(x_grid, dtype=float)
        _check_grid(x, "x_grid", nonneg=True)
        z = _curve_inversion(params, x, z0, aux_damping)
        b0 = _curve_mech_amplitude(params, x, z, aux_damping)
    else:
        b0 = np.asarray(b0_grid, dtype=complex)
        if b0.ndim != 1 or b0.size == 0:
            raise ParamError("b0_grid must be a non-empty 1-D sequence")
        if z0 is not None:
            z = np.full(b0.shape, float(z0))
        else:
            sq = params.gamma_q ** 2 + 4.0 * params.omega_q ** 2
            z = -sq / (sq + 8.0 * params.g ** 2 * np.abs(b0) ** 2)

    omega_sq = np.empty(b0.shape, dtype=complex)
    for i in np.ndindex(b0.shape):
        c = bistability_coefficients(params, float(z[i]), aux_damping)
        lorentz = params.gamma_a ** 2 + (params.delta_a
                                         - 2.0 * params.chi * b0[i].real) ** 2
        omega_sq[i] = (lorentz * (c.eps4 + 1j * c.eps5) * b0[i]
                       / (1j * params.chi * c.eps3))

    defects = np.abs(omega_sq.imag) / np.maximum(np.abs(omega_sq), 1e-300)
    if np.any(defects > 1e-6):
        warnings.warn("mechanical samples deviate from the consistency curve "
                      f"(max relative imaginary defect {defects.max():.3g})",
                      stacklevel=2)
    omega = np.sqrt(np.maximum(omega_sq.real, 0.0))
    return BistabilityCurve(mode="phonon", x_values=np.abs(b0) ** 2,
                            omega_values=omega,
                            branch_ids=_monotone_labels(omega),
                            z0_values=np.asarray(z, dtype=float),
                            defects=defects)


def count_real_solutions(params: SystemParams, omega_grid,
                         x_max: float | None = None,
                         n_grid: int = 2000) -> np.ndarray:
    """Number of steady branches for each drive amplitude in ``omega_grid``."""
    omegas = np.asarray(omega_grid, dtype=float)
    _check_grid(omegas, "omega_grid", nonneg=True)
    counts = np.empty(omegas.shape, dtype=int)
    for i, om in enumerate(omegas):
        p = params.replace(drive=complex(om), probe=0j)
        counts[i] = len(solve_steady_states(p, x_max=x_max, n_grid=n_grid))
    return counts


def _check_grid(arr: np.ndarray, name: str, nonneg: bool = False):
    if arr.ndim != 1 or arr.size == 0:
        raise ParamError(f"{name} must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(arr)):
        raise ParamError(f"{name} contains non-finite values")
    if arr.size > 1 and not np.all(np.diff(arr) > 0):
        raise ParamError(f"{name} must be strictly increasing")
    if nonneg and arr[0] < 0:
        raise ParamError(f"{name} must be nonnegative")


def _monotone_labels(omega: np.ndarray) -> np.ndarray:
    """Label samples so each label covers one monotone run of the curve."""
    labels = np.zeros(omega.shape, dtype=int)
    if omega.size < 3:
        return labels
    d = np.diff(omega)
    sign = 0.0
    branch = 0
    for i, step in enumerate(d):
        s = np.sign(step)
        if s != 0.0 and sign != 0.0 and s != sign:
            branch += 1
        if s != 0.0:
            sign = s
        labels[i + 1] = branch
    return labels
