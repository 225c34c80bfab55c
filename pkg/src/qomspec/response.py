"""First-order sideband response of the driven system to the weak probe.

For a steady operating point the probe creates sidebands at +/- the
probe-drive detuning in every degree of freedom.  Eliminating the qubit
sidebands in favor of the mechanical ones, and those in favor of the
cavity ones, yields a chain of complex coefficients (lambda1..lambda10
with denominators D1..D5) that is evaluated here in strict dependency
order; each coefficient is computed exactly once per evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParamError, SingularResponseError
from .params import DetuningGrid, SystemParams
from .steady import SteadyState

# below this, the cavity sideband determinant counts as an exact pole
_SINGULAR_DETERMINANT = 1e-30


@dataclass(frozen=True)
class ResponseCoefficients:
    """Complete sideband chain at one probe-drive detuning.

    ``A_minus`` is the cavity amplitude at the probe frequency (the linear
    response), ``A_plus`` the four-wave-mixing amplitude at the image
    frequency; B/L/Z pairs are the mechanical, qubit-coherence and
    inversion sidebands recovered by back-substitution.
    """

    delta: float
    lambda1: complex
    lambda2: complex
    lambda3: complex
    lambda4: complex
    lambda5: complex
    lambda6: complex
    lambda7: complex
    lambda8: complex
    lambda9: complex
    lambda10: complex
    D1: complex
    D2: complex
    D3: complex
    D4: complex
    D5: complex
    A_plus: complex
    A_minus: complex
    B_plus: complex
    B_minus: complex
    L_plus: complex
    L_minus: complex
    Z_plus: complex
    Z_minus: complex

    def to_debug_dict(self) -> dict:
        """Every coefficient as {name: [re, im]} for cross-implementation diffing."""
        out = {"delta": self.delta}
        for name in ("lambda1", "lambda2", "lambda3", "lambda4", "lambda5",
                     "lambda6", "lambda7", "lambda8", "lambda9", "lambda10",
                     "D1", "D2", "D3", "D4", "D5",
                     "A_plus", "A_minus", "B_plus", "B_minus",
                     "L_plus", "L_minus", "Z_plus", "Z_minus"):
            value = getattr(self, name)
            out[name] = [value.real, value.imag]
        return out


def compute_response(params: SystemParams, steady: SteadyState, delta: float,
                     displacement_shift: str = "real") -> ResponseCoefficients:
    """Evaluate the full sideband chain at probe-drive detuning ``delta``.

    ``steady`` must be a converged branch for ``params``.

    ``displacement_shift`` fixes the static mechanical contribution to the
    cavity detuning inside the sideband denominators: "real" uses the full
    displacement 2*Re B0, matching the zeroth-order balance and the
    time-domain integration (validated in the test suite); "amplitude"
    keeps only the complex amplitude itself and is retained for
    comparison.
    """
    if displacement_shift not in ("real", "amplitude"):
        raise ParamError("displacement_shift must be 'real' or 'amplitude', "
                         f"got {displacement_shift!r}")

    g, chi = params.g, params.chi
    gamma_q, omega_q = params.gamma_q, params.omega_q
    gamma_b, omega_b = params.gamma_b, params.omega_b
    gamma_a, delta_a = params.gamma_a, params.delta_a
    eps = params.probe
    a0, b0, l0, z0 = steady.A0, steady.B0, steady.L0, steady.Z0
    nb = abs(b0) ** 2
    na = abs(a0) ** 2

    lam1 = 2.0 * g / (delta - 1j * gamma_q)

    d1 = gamma_q / 2 - 1j * omega_q - 1j * g * lam1 * nb + 1j * delta
    d2 = gamma_q / 2 - 1j * omega_q + 1j * g * lam1.conjugate() * nb - 1j * delta
    d3 = ((gamma_q / 2 + 1j * delta) ** 2
          - 2j * g * lam1 * nb * (gamma_q / 2 + 1j * delta) + omega_q ** 2)

    lam2 = (1j * g * z0 * d1
            - g * lam1 * b0 * l0.conjugate() * (1j * d1 - g * lam1 * nb)) / d3
    lam3 = (1j * g * lam1 * b0
            * (1j * g * lam1 * nb * l0 + 1j * g * b0 * z0 + d1 * l0)) / d3
    lam4 = (1j * g * z0 * d2
            + g * lam1.conjugate() * b0 * l0.conjugate()
            * (1j * d2 + g * lam1.conjugate() * nb)) / d3.conjugate()
    lam5 = (1j * g * lam1.conjugate() * b0
            * (1j * g * lam1.conjugate() * nb * l0 - 1j * g * b0 * z0
               - d2 * l0)) / d3.conjugate()

    d4 = gamma_b - 1j * (omega_b - delta + g * lam4.conjugate())
    d5 = gamma_b + 1j * (omega_b + delta + g * lam2)

    det_b = d4 * d5 - g ** 2 * lam3 * lam5.conjugate()
    lam6 = (-g * chi * lam3 + 1j * chi * d4) / det_b
    lam7 = (-g * chi * lam5 + 1j * chi * d5.conjugate()) / det_b.conjugate()

    mech = lam6.conjugate() + lam7
    if displacement_shift == "real":
        shift_minus = shift_plus = 2.0 * chi * b0.real
    else:
        shift_minus = chi * b0
        shift_plus = chi * b0.conjugate()
    lam8 = gamma_a + 1j * (delta_a - delta - shift_minus - chi * mech * na)
    lam9 = gamma_a - 1j * (delta_a + delta - shift_plus - chi * mech * na)
    lam10 = chi ** 2 * mech ** 2 * na ** 2

    det_a = lam8 * lam9 - lam10
    if abs(det_a) < _SINGULAR_DETERMINANT:
        raise SingularResponseError(
            f"cavity sideband determinant vanished at delta={delta:g}")

    a_minus = lam9 * eps / det_a
    a_plus = (1j * chi * (lam6 + lam7.conjugate()) * a0 ** 2 * eps.conjugate()
              / det_a.conjugate())

    mix = a0.conjugate() * a_plus + a0 * a_minus.conjugate()
    b_plus = lam6 * mix
    b_minus = lam7 * mix.conjugate()

    l_plus = lam2 * b_plus + lam3 * b_minus.conjugate()
    l_minus = lam4 * b_minus + lam5 * b_plus.conjugate()

    z_plus = -lam1 * (b0 * l_minus.conjugate() + l0.conjugate() * b_plus
                      - b0.conjugate() * l_plus - l0 * b_minus.conjugate())
    z_minus = lam1.conjugate() * (b0 * l_plus.conjugate() + l0.conjugate() * b_minus
                                  - b0.conjugate() * l_minus - l0 * b_plus.conjugate())

    return ResponseCoefficients(
        delta=float(delta),
        lambda1=lam1, lambda2=lam2, lambda3=lam3, lambda4=lam4, lambda5=lam5,
        lambda6=lam6, lambda7=lam7, lambda8=lam8, lambda9=lam9, lambda10=lam10,
        D1=d1, D2=d2, D3=d3, D4=d4, D5=d5,
        A_plus=a_plus, A_minus=a_minus,
        B_plus=b_plus, B_minus=b_minus,
        L_plus=l_plus, L_minus=l_minus,
        Z_plus=z_plus, Z_minus=z_minus)


def response_sweep(params: SystemParams, steady: SteadyState, grid,
                   displacement_shift: str = "real") -> list[ResponseCoefficients]:
    """One :class:`ResponseCoefficients` per detuning, evaluated independently."""
    deltas = grid.values if isinstance(grid, DetuningGrid) else np.asarray(grid, dtype=float)
    out = []
    for delta in deltas:
        try:
            out.append(compute_response(params, steady, float(delta),
                                        displacement_shift=displacement_shift))
        except SingularResponseError as exc:
            raise SingularResponseError(f"{exc} (delta={delta:g})") from exc
    return out
