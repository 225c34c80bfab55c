"""qomspec: driven optomechanical cavity with a qubit-coupled mechanical mode.

Computes drive-only steady states and their bistability curves, the
first-order sideband response to a weak probe, the resulting absorption /
dispersion / Stokes / anti-Stokes spectra, and an independent time-domain
cross-check of all of it.
"""

from ._kernel import available_backends, default_backend
from .errors import (BracketRangeError, BranchSelectionError, DivergenceError,
                     FixedPointError, GridError, NumericalError, ParamError,
                     QomspecError, SingularResponseError, StiffnessError,
                     UnstableOperatingPointError, ValidationError,
                     WindowAlignmentError)
from .oracle import (Harmonics, MeanFieldState, OracleResult, StabilityReport,
                     Trajectory, classify_stability, extract_harmonics,
                     integrate, mean_field_jacobian, mean_field_rhs,
                     transient_time)
from .params import (DetuningGrid, LinearResponseWarning, SystemParams,
                     load_params)
from .response import ResponseCoefficients, compute_response, response_sweep
from .spectra import (SpectrumPoint, WindowReport, select_branch,
                      spectrum_point, spectrum_sweep, window_analysis)
from .steady import (BistabilityCoefficients, BistabilityCurve, SteadyState,
                     bistability_coefficients, count_real_solutions,
                     phonon_bistability_curve, photon_bistability_curve,
                     solve_steady_states)
from .sweeps import (OracleComparison, SweepSpec, oracle_check, run_preset,
                     run_sweep)

__version__ = "0.1.0"

__all__ = [
    "available_backends", "default_backend",
    "QomspecError", "ValidationError", "ParamError", "GridError",
    "NumericalError", "FixedPointError", "BracketRangeError",
    "SingularResponseError", "BranchSelectionError",
    "UnstableOperatingPointError", "StiffnessError", "DivergenceError",
    "WindowAlignmentError",
    "SystemParams", "DetuningGrid", "LinearResponseWarning", "load_params",
    "SteadyState", "BistabilityCoefficients", "BistabilityCurve",
    "solve_steady_states", "bistability_coefficients",
    "photon_bistability_curve", "phonon_bistability_curve",
    "count_real_solutions",
    "ResponseCoefficients", "compute_response", "response_sweep",
    "SpectrumPoint", "WindowReport", "spectrum_point", "spectrum_sweep",
    "select_branch", "window_analysis",
    "MeanFieldState", "Trajectory", "Harmonics", "OracleResult",
    "StabilityReport", "integrate", "extract_harmonics", "classify_stability",
    "mean_field_jacobian", "mean_field_rhs", "transient_time",
    "SweepSpec", "OracleComparison", "run_sweep", "run_preset", "oracle_check",
]
