import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import qomspec as q

from conftest import SPECTRUM_CONFIG, detuning_grid, rel_err


def test_qubit_decoupled_mechanical_coefficients(spectrum_params_g0):
    p = spectrum_params_g0
    (s,) = q.solve_steady_states(p)
    for frac in (0.9, 1.0, 1.07):
        delta = frac * p.omega_b
        r = q.compute_response(p, s, delta)
        assert r.lambda2 == 0 and r.lambda3 == 0
        assert r.lambda4 == 0 and r.lambda5 == 0
        d5 = p.gamma_b + 1j * (p.omega_b + delta)
        d4_conj = p.gamma_b + 1j * (p.omega_b - delta)
        assert rel_err(r.lambda6, 1j * p.chi / d5) < 1e-12
        assert rel_err(r.lambda7, 1j * p.chi / d4_conj) < 1e-12


def test_no_optomechanical_coupling_gives_bare_lorentzian():
    p = q.load_params(dict(SPECTRUM_CONFIG, chi_hz=0.0))
    (s,) = q.solve_steady_states(p)
    for frac in (0.95, 1.0, 1.1):
        delta = frac * p.omega_b
        r = q.compute_response(p, s, delta)
        assert r.A_plus == 0
        assert r.lambda10 == 0
        want = p.probe / (p.gamma_a + 1j * (p.delta_a - delta))
        assert rel_err(r.A_minus, want) < 1e-12


def test_drive_off_lorentzian_centered_on_cavity():
    with pytest.warns(q.LinearResponseWarning):
        p = q.load_params(dict(SPECTRUM_CONFIG, drive_hz=0.0, probe_hz=19.8))
    (s,) = q.solve_steady_states(p)
    deltas = detuning_grid(p, 0.5, 1.5, 801)
    amps = []
    for delta in deltas:
        r = q.compute_response(p, s, delta)
        assert r.lambda10 == 0
        want = p.probe / (p.gamma_a + 1j * (p.delta_a - delta))
        assert rel_err(r.A_minus, want) < 1e-12
        amps.append(abs(r.A_minus))
    # single Lorentzian peaked where the probe meets the cavity
    peak = deltas[int(np.argmax(amps))]
    assert abs(peak - p.delta_a) < deltas[1] - deltas[0]


def test_hermiticity_of_inversion_sidebands(spectrum_params, spectrum_steady):
    for delta in detuning_grid(spectrum_params, 0.85, 1.15, 31):
        r = q.compute_response(spectrum_params, spectrum_steady, delta)
        assert abs(r.Z_plus - r.Z_minus.conjugate()) <= \
            1e-12 * max(abs(r.Z_plus), 1e-300)


@settings(max_examples=20, deadline=None)
@given(frac=st.floats(min_value=0.5, max_value=1.5),
       scale=st.floats(min_value=1e-3, max_value=1.0))
def test_probe_linearity(frac, scale):
    p = q.load_params(SPECTRUM_CONFIG)
    (s,) = q.solve_steady_states(p)
    delta = frac * p.omega_b
    r1 = q.compute_response(p, s, delta)
    p2 = p.replace(probe=p.probe * scale)
    r2 = q.compute_response(p2, s, delta)
    assert rel_err(r2.A_minus, r1.A_minus * scale) < 1e-12
    # the normalized output is probe-independent
    t1 = 2 * p.gamma_a * r1.A_minus / p.probe
    t2 = 2 * p.gamma_a * r2.A_minus / p2.probe
    assert rel_err(t2, t1) < 1e-12


def test_sweep_single_point(spectrum_params, spectrum_steady):
    out = q.response_sweep(spectrum_params, spectrum_steady,
                           [spectrum_params.omega_b])
    assert len(out) == 1


def test_sweep_is_pointwise_pure(spectrum_params, spectrum_steady):
    deltas = detuning_grid(spectrum_params, 0.9, 1.1, 11)
    fwd = q.response_sweep(spectrum_params, spectrum_steady, deltas)
    rev = q.response_sweep(spectrum_params, spectrum_steady, deltas[::-1])
    for a, b in zip(fwd, rev[::-1]):
        assert a == b


def test_displacement_shift_conventions_differ(spectrum_params, spectrum_steady):
    delta = spectrum_params.omega_b
    full = q.compute_response(spectrum_params, spectrum_steady, delta)
    alt = q.compute_response(spectrum_params, spectrum_steady, delta,
                             displacement_shift="amplitude")
    assert rel_err(alt.A_minus, full.A_minus) > 1e-4
    with pytest.raises(q.ParamError):
        q.compute_response(spectrum_params, spectrum_steady, delta,
                           displacement_shift="bogus")


def test_debug_dict_covers_every_coefficient(spectrum_params, spectrum_steady):
    r = q.compute_response(spectrum_params, spectrum_steady,
                           spectrum_params.omega_b)
    dump = r.to_debug_dict()
    assert dump["delta"] == spectrum_params.omega_b
    for key in ("lambda1", "lambda10", "D1", "D5", "A_minus", "Z_plus"):
        re, im = dump[key]
        assert np.isfinite(re) and np.isfinite(im)
    assert len(dump) == 24
