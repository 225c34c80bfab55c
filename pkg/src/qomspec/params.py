"""Physical parameters of the hybrid cavity-mechanics-qubit system.

All internal quantities are angular frequencies in rad/us (1 MHz of
ordinary frequency = 2*pi rad/us).  Configuration files quote ordinary
frequencies in Hz; the 2*pi conversion happens exactly once, at load
time.  That keeps the numbers fed to root finders and integrators at
O(10^2)-O(10^3) instead of O(10^8).
"""

from __future__ import annotations

import cmath
import json
import math
import warnings
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import GridError, ParamError

# one ordinary Hz expressed in the canonical angular unit (rad/us)
RAD_PER_US_PER_HZ = 2.0e-6 * math.pi

# |probe| above this fraction of |drive| is outside the weak-probe regime
LINEAR_RESPONSE_RATIO = 1e-2

_HZ_FIELDS = ("omega_b", "omega_q", "delta_a", "chi", "g",
              "gamma_a", "gamma_b", "gamma_q", "drive", "probe")
_PHASE_KEYS = ("drive_phase_deg", "probe_phase_deg")


class LinearResponseWarning(UserWarning):
    """Probe amplitude is too strong for first-order response to be reliable."""


@dataclass(frozen=True)
class SystemParams:
    """All rates, frequencies and drives of the hybrid system, in rad/us.

    Fields
    ------
    omega_b, omega_q : mechanical and qubit angular frequencies (> 0)
    delta_a          : cavity-drive detuning (cavity minus drive frequency)
    chi              : radiation-pressure coupling of cavity to mechanics
    g                : excitation-exchange coupling of qubit to mechanics
    gamma_a, gamma_b, gamma_q : cavity / mechanical / qubit decay rates (> 0)
    drive, probe     : complex Rabi amplitudes of the strong and weak tones

    Instances are immutable and safe to share across threads.
    """

    omega_b: float
    omega_q: float
    delta_a: float
    chi: float
    g: float
    gamma_a: float
    gamma_b: float
    gamma_q: float
    drive: complex
    probe: complex

    def __post_init__(self):
        for name in ("omega_b", "omega_q", "delta_a", "chi", "g",
                     "gamma_a", "gamma_b", "gamma_q"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ParamError(f"{name} must be a finite real number, got {value!r}")
            object.__setattr__(self, name, float(value))
        for name in ("drive", "probe"):
            value = complex(getattr(self, name))
            if not (math.isfinite(value.real) and math.isfinite(value.imag)):
                raise ParamError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        for name in ("gamma_a", "gamma_b", "gamma_q"):
            if getattr(self, name) <= 0.0:
                raise ParamError(f"{name} must be positive (every response formula "
                                 f"divides by a damped denominator), got {getattr(self, name)}")
        for name in ("omega_b", "omega_q"):
            if getattr(self, name) <= 0.0:
                raise ParamError(f"{name} must be positive, got {getattr(self, name)}")
        if abs(self.probe) > LINEAR_RESPONSE_RATIO * abs(self.drive) and abs(self.probe) > 0:
            warnings.warn(
                "probe amplitude exceeds 1% of the drive amplitude; first-order "
                "response results may be inaccurate",
                LinearResponseWarning, stacklevel=2)

    def replace(self, **changes) -> "SystemParams":
        """Return a copy with the given fields replaced."""
        return replace(self, **changes)

    def rescaled(self, k: float) -> "SystemParams":
        """Scale every frequency-dimensioned field by ``k`` (unit change)."""
        if k <= 0:
            raise ParamError("rescaling factor must be positive")
        return SystemParams(*(k * getattr(self, f) for f in _HZ_FIELDS))

    def to_hz_dict(self) -> dict:
        """Flat Hz-keyed mapping; inverse of :func:`load_params`."""
        out = {}
        for name in _HZ_FIELDS:
            value = getattr(self, name)
            if name in ("drive", "probe"):
                out[f"{name}_hz"] = abs(value) / RAD_PER_US_PER_HZ
                phase = math.degrees(cmath.phase(value)) if value != 0 else 0.0
                if phase != 0.0:
                    out[f"{name}_phase_deg"] = phase
            else:
                out[f"{name}_hz"] = value / RAD_PER_US_PER_HZ
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_hz_dict(), indent=2, sort_keys=True)


def load_params(source) -> SystemParams:
    """Build a validated :class:`SystemParams` from a Hz-keyed configuration.

    ``source`` may be a mapping, a path to a JSON file, or a path to a flat
    ``key = value`` text file (``#`` comments allowed).  Every field is an
    ordinary frequency in Hz and is multiplied by 2*pi*1e-6 into rad/us.
    Optional ``drive_phase_deg`` / ``probe_phase_deg`` give the drives a
    complex phase.
    """
    if isinstance(source, Mapping):
        raw = dict(source)
    else:
        path = Path(source)
        text = path.read_text()
        if path.suffix.lower() == ".json" or text.lstrip().startswith("{"):
            raw = json.loads(text)
        else:
            raw = _parse_flat_config(text)

    known = {f"{n}_hz" for n in _HZ_FIELDS} | set(_PHASE_KEYS)
    unknown = set(raw) - known
    if unknown:
        raise ParamError(f"unknown configuration keys: {sorted(unknown)}")

    values = {}
    for name in _HZ_FIELDS:
        key = f"{name}_hz"
        if key not in raw:
            raise ParamError(f"missing configuration key: {key}")
        try:
            hz = float(raw[key])
        except (TypeError, ValueError):
            raise ParamError(f"{key} is not a number: {raw[key]!r}") from None
        if not math.isfinite(hz):
            raise ParamError(f"{key} must be finite, got {hz!r}")
        values[name] = hz * RAD_PER_US_PER_HZ

    for name in ("drive", "probe"):
        phase = float(raw.get(f"{name}_phase_deg", 0.0))
        values[name] = values[name] * cmath.exp(1j * math.radians(phase))

    return SystemParams(**values)


def _parse_flat_config(text: str) -> dict:
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        for sep in ("=", ":"):
            if sep in line:
                key, _, value = line.partition(sep)
                out[key.strip()] = value.strip()
                break
        else:
            raise ParamError(f"cannot parse config line {lineno}: {line!r}")
    return out


@dataclass(frozen=True)
class DetuningGrid:
    """Ordered probe-drive detunings (rad/us), strictly increasing and finite."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise GridError("detuning grid must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(arr)):
            raise GridError("detuning grid contains non-finite values")
        if arr.size > 1 and not np.all(np.diff(arr) > 0):
            raise GridError("detuning grid must be strictly increasing")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    def __len__(self):
        return self.values.size

    def __iter__(self):
        return iter(self.values)

    @property
    def spacing(self) -> float:
        """Largest gap between consecutive points (0 for a single point)."""
        if self.values.size < 2:
            return 0.0
        return float(np.max(np.diff(self.values)))

    @classmethod
    def linspace(cls, start: float, stop: float, num: int) -> "DetuningGrid":
        return cls(np.linspace(start, stop, num))

    @classmethod
    def around_mechanical_resonance(cls, params: SystemParams,
                                    lo: float = 0.8, hi: float = 1.2,
                                    num: int = 2001) -> "DetuningGrid":
        """Grid of ``num`` points spanning [lo, hi] * omega_b."""
        return cls(np.linspace(lo * params.omega_b, hi * params.omega_b, num))
