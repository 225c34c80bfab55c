"""Pure-Python fallback integrator for the mean-field equations.

Same Dormand-Prince 5(4) scheme, step control and output protocol as the
compiled core, written with plain Python complex scalars.  Selected
automatically when the extension module is unavailable; expect roughly
two orders of magnitude less throughput.
"""

import math

BACKEND_NAME = "python"

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1
STATUS_DIVERGED = 2

# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                                49.0 / 176.0, -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                           -2187.0 / 6784.0, 11.0 / 84.0)
# 5th-order minus embedded 4th-order weights (error estimator)
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                                -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


def integrate_mean_field(pars, y0, t0, t1, rtol, atol, dt_max, amp_limit, t_eval, out):
    """March the 7-real-dimension mean-field state from t0 to t1.

    pars:   (gamma_a, delta_a, chi, om_re, om_im, gamma_b, omega_b, g,
             gamma_q, omega_q, eps_re, eps_im, delta)
    y0:     (re a, im a, re b, im b, re l, im l, z)
    t_eval: ascending times in [t0, t1]; the stepper lands on each exactly
    out:    float64 array of shape (len(t_eval), 7), filled in place

    Returns (status, n_steps, n_rejected, t_reached).
    """
    (gamma_a, delta_a, chi, om_re, om_im, gamma_b, omega_b, g,
     gamma_q, omega_q, eps_re, eps_im, delta) = [float(v) for v in pars]
    ca = -(gamma_a + 1j * delta_a)
    cb = -(gamma_b + 1j * omega_b)
    cl = -(gamma_q / 2.0 + 1j * omega_q)
    om = om_re + 1j * om_im
    eps = eps_re + 1j * eps_im
    have_probe = eps != 0.0

    def rhs(t, a, b, l, z):
        da = ca * a + 1j * chi * a * (2.0 * b.real) + om
        if have_probe:
            da += eps * complex(math.cos(delta * t), -math.sin(delta * t))
        db = cb * b + 1j * chi * (a.real * a.real + a.imag * a.imag) - 1j * g * l
        dl = cl * l + 1j * g * b * z
        dz = -gamma_q * (z + 1.0) + 4.0 * g * (b.imag * l.real - b.real * l.imag)
        return da, db, dl, dz

    a = y0[0] + 1j * y0[1]
    b = y0[2] + 1j * y0[3]
    l = y0[4] + 1j * y0[5]
    z = float(y0[6])
    t = float(t0)
    t1 = float(t1)
    span = t1 - t
    min_step = 1e-15 * max(span, abs(t1), 1.0)
    amp_limit_sq = amp_limit * amp_limit

    k1a, k1b, k1l, k1z = rhs(t, a, b, l, z)

    # initial step from the local derivative scale
    d0 = _scaled_norm(a, b, l, z, a, b, l, z, rtol, atol)
    d1 = _scaled_norm(k1a, k1b, k1l, k1z, a, b, l, z, rtol, atol)
    h = 0.01 * d0 / d1 if d1 > 0 else span * 1e-6
    h = min(h if h > 0 else span * 1e-6, span, dt_max)

    n_eval = len(t_eval)
    j = 0
    n_steps = 0
    n_rejected = 0

    while j < n_eval and t_eval[j] <= t + min_step:
        out[j, 0], out[j, 1] = a.real, a.imag
        out[j, 2], out[j, 3] = b.real, b.imag
        out[j, 4], out[j, 5] = l.real, l.imag
        out[j, 6] = z
        j += 1

    while t < t1 - min_step:
        h = min(h, dt_max, t1 - t)
        if j < n_eval:
            h = min(h, t_eval[j] - t)
        if h < min_step:
            return STATUS_STEP_UNDERFLOW, n_steps, n_rejected, t

        k2a, k2b, k2l, k2z = rhs(t + _C2 * h,
                                 a + h * (_A21 * k1a), b + h * (_A21 * k1b),
                                 l + h * (_A21 * k1l), z + h * (_A21 * k1z))
        k3a, k3b, k3l, k3z = rhs(t + _C3 * h,
                                 a + h * (_A31 * k1a + _A32 * k2a),
                                 b + h * (_A31 * k1b + _A32 * k2b),
                                 l + h * (_A31 * k1l + _A32 * k2l),
                                 z + h * (_A31 * k1z + _A32 * k2z))
        k4a, k4b, k4l, k4z = rhs(t + _C4 * h,
                                 a + h * (_A41 * k1a + _A42 * k2a + _A43 * k3a),
                                 b + h * (_A41 * k1b + _A42 * k2b + _A43 * k3b),
                                 l + h * (_A41 * k1l + _A42 * k2l + _A43 * k3l),
                                 z + h * (_A41 * k1z + _A42 * k2z + _A43 * k3z))
        k5a, k5b, k5l, k5z = rhs(t + _C5 * h,
                                 a + h * (_A51 * k1a + _A52 * k2a + _A53 * k3a + _A54 * k4a),
                                 b + h * (_A51 * k1b + _A52 * k2b + _A53 * k3b + _A54 * k4b),
                                 l + h * (_A51 * k1l + _A52 * k2l + _A53 * k3l + _A54 * k4l),
                                 z + h * (_A51 * k1z + _A52 * k2z + _A53 * k3z + _A54 * k4z))
        k6a, k6b, k6l, k6z = rhs(t + h,
                                 a + h * (_A61 * k1a + _A62 * k2a + _A63 * k3a
                                          + _A64 * k4a + _A65 * k5a),
                                 b + h * (_A61 * k1b + _A62 * k2b + _A63 * k3b
                                          + _A64 * k4b + _A65 * k5b),
                                 l + h * (_A61 * k1l + _A62 * k2l + _A63 * k3l
                                          + _A64 * k4l + _A65 * k5l),
                                 z + h * (_A61 * k1z + _A62 * k2z + _A63 * k3z
                                          + _A64 * k4z + _A65 * k5z))

        na = a + h * (_B1 * k1a + _B3 * k3a + _B4 * k4a + _B5 * k5a + _B6 * k6a)
        nb = b + h * (_B1 * k1b + _B3 * k3b + _B4 * k4b + _B5 * k5b + _B6 * k6b)
        nl = l + h * (_B1 * k1l + _B3 * k3l + _B4 * k4l + _B5 * k5l + _B6 * k6l)
        nz = z + h * (_B1 * k1z + _B3 * k3z + _B4 * k4z + _B5 * k5z + _B6 * k6z)

        k7a, k7b, k7l, k7z = rhs(t + h, na, nb, nl, nz)

        ea = h * (_E1 * k1a + _E3 * k3a + _E4 * k4a + _E5 * k5a + _E6 * k6a + _E7 * k7a)
        eb = h * (_E1 * k1b + _E3 * k3b + _E4 * k4b + _E5 * k5b + _E6 * k6b + _E7 * k7b)
        el = h * (_E1 * k1l + _E3 * k3l + _E4 * k4l + _E5 * k5l + _E6 * k6l + _E7 * k7l)
        ez = h * (_E1 * k1z + _E3 * k3z + _E4 * k4z + _E5 * k5z + _E6 * k6z + _E7 * k7z)

        err = _error_norm(ea, eb, el, ez, a, b, l, z, na, nb, nl, nz, rtol, atol)

        if err <= 1.0:
            t = t + h
            a, b, l, z = na, nb, nl, nz
            k1a, k1b, k1l, k1z = k7a, k7b, k7l, k7z
            n_steps += 1

            if a.real * a.real + a.imag * a.imag > amp_limit_sq:
                return STATUS_DIVERGED, n_steps, n_rejected, t

            while j < n_eval and t_eval[j] <= t + min_step:
                out[j, 0], out[j, 1] = a.real, a.imag
                out[j, 2], out[j, 3] = b.real, b.imag
                out[j, 4], out[j, 5] = l.real, l.imag
                out[j, 6] = z
                j += 1

            factor = _MAX_FACTOR if err == 0.0 else min(
                _MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * err ** -0.2))
            h *= factor
        else:
            n_rejected += 1
            h *= max(_MIN_FACTOR, _SAFETY * err ** -0.2)

    return STATUS_OK, n_steps, n_rejected, t


def _scaled_norm(xa, xb, xl, xz, a, b, l, z, rtol, atol):
    s = 0.0
    for x, y in ((xa.real, a.real), (xa.imag, a.imag),
                 (xb.real, b.real), (xb.imag, b.imag),
                 (xl.real, l.real), (xl.imag, l.imag),
                 (xz, z)):
        sc = atol + rtol * abs(y)
        s += (x / sc) ** 2
    return math.sqrt(s / 7.0)


def _error_norm(ea, eb, el, ez, a, b, l, z, na, nb, nl, nz, rtol, atol):
    s = 0.0
    for e, y0c, y1c in ((ea.real, a.real, na.real), (ea.imag, a.imag, na.imag),
                        (eb.real, b.real, nb.real), (eb.imag, b.imag, nb.imag),
                        (el.real, l.real, nl.real), (el.imag, l.imag, nl.imag),
                        (ez, z, nz)):
        sc = atol + rtol * max(abs(y0c), abs(y1c))
        s += (e / sc) ** 2
    return math.sqrt(s / 7.0)
