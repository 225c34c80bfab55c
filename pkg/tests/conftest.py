import numpy as np
import pytest

import qomspec as q

# transmission-spectrum parameter set (cavity-drive detuning on the
# mechanical sideband, weak probe at 1e-3 of the drive)
SPECTRUM_CONFIG = dict(omega_b_hz=100e6, omega_q_hz=100e6, chi_hz=10e6,
                       g_hz=10e6, gamma_a_hz=4e6, gamma_q_hz=0.1e6,
                       gamma_b_hz=1000.0, delta_a_hz=100e6,
                       drive_hz=19.8e6, probe_hz=19.8e3)

# photon-bistability parameter set (smaller cavity-drive detuning)
BISTABILITY_CONFIG = dict(SPECTRUM_CONFIG, delta_a_hz=50e6, probe_hz=0.0)

# phonon-bistability parameter set
PHONON_CONFIG = dict(SPECTRUM_CONFIG, delta_a_hz=20e6, probe_hz=0.0)


@pytest.fixture(scope="session")
def spectrum_params():
    return q.load_params(SPECTRUM_CONFIG)


@pytest.fixture(scope="session")
def spectrum_params_g0():
    return q.load_params(dict(SPECTRUM_CONFIG, g_hz=0.0))


@pytest.fixture(scope="session")
def bistability_params():
    return q.load_params(BISTABILITY_CONFIG)


@pytest.fixture(scope="session")
def phonon_params():
    return q.load_params(PHONON_CONFIG)


@pytest.fixture(scope="session")
def spectrum_steady(spectrum_params):
    branches = q.solve_steady_states(spectrum_params)
    assert len(branches) == 1
    return branches[0]


@pytest.fixture(scope="session")
def fold_params():
    # drive strength inside the bistable fold: three steady branches
    return q.load_params(dict(BISTABILITY_CONFIG, drive_hz=50e6))


def rel_err(got, want):
    return abs(got - want) / max(abs(want), 1e-300)


def detuning_grid(params, lo=0.8, hi=1.2, n=2001):
    return np.linspace(lo * params.omega_b, hi * params.omega_b, n)
