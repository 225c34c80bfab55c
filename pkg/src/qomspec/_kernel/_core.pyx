# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled integrator core for the mean-field equations.

Dormand-Prince 5(4) with proportional step control, exact landing on
requested output times, divergence and step-underflow detection.  The hot
loop runs without the GIL so trajectories can be fanned out across
threads.
"""

from libc.math cimport cos, sin, sqrt, fabs, fmin, fmax, pow

BACKEND_NAME = "compiled"

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1
STATUS_DIVERGED = 2

ctypedef double complex cplx

cdef double C2 = 1.0 / 5.0
cdef double C3 = 3.0 / 10.0
cdef double C4 = 4.0 / 5.0
cdef double C5 = 8.0 / 9.0
cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0
cdef double A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0

cdef double SAFETY = 0.9
cdef double MIN_FACTOR = 0.2
cdef double MAX_FACTOR = 5.0

cdef int ST_OK = 0
cdef int ST_UNDERFLOW = 1
cdef int ST_DIVERGED = 2


cdef struct Model:
    double gamma_a, delta_a, chi
    cplx om
    double gamma_b, omega_b, g
    double gamma_q, omega_q
    cplx eps
    double delta
    bint have_probe


cdef inline void rhs(Model *m, double t, cplx a, cplx b, cplx l, double z,
                     cplx *da, cplx *db, cplx *dl, double *dz) noexcept nogil:
    cdef cplx ca = -(m.gamma_a + 1j * m.delta_a)
    cdef cplx cb = -(m.gamma_b + 1j * m.omega_b)
    cdef cplx cl = -(m.gamma_q / 2.0 + 1j * m.omega_q)
    da[0] = ca * a + 1j * m.chi * a * (2.0 * b.real) + m.om
    if m.have_probe:
        da[0] = da[0] + m.eps * (cos(m.delta * t) - 1j * sin(m.delta * t))
    db[0] = cb * b + 1j * m.chi * (a.real * a.real + a.imag * a.imag) - 1j * m.g * l
    dl[0] = cl * l + 1j * m.g * b * z
    dz[0] = -m.gamma_q * (z + 1.0) + 4.0 * m.g * (b.imag * l.real - b.real * l.imag)


cdef inline double scaled_norm(cplx xa, cplx xb, cplx xl, double xz,
                               cplx a, cplx b, cplx l, double z,
                               cplx na, cplx nb, cplx nl, double nz,
                               double rtol, double atol) noexcept nogil:
    cdef double s = 0.0
    cdef double sc
    sc = atol + rtol * fmax(fabs(a.real), fabs(na.real))
    s += (xa.real / sc) * (xa.real / sc)
    sc = atol + rtol * fmax(fabs(a.imag), fabs(na.imag))
    s += (xa.imag / sc) * (xa.imag / sc)
    sc = atol + rtol * fmax(fabs(b.real), fabs(nb.real))
    s += (xb.real / sc) * (xb.real / sc)
    sc = atol + rtol * fmax(fabs(b.imag), fabs(nb.imag))
    s += (xb.imag / sc) * (xb.imag / sc)
    sc = atol + rtol * fmax(fabs(l.real), fabs(nl.real))
    s += (xl.real / sc) * (xl.real / sc)
    sc = atol + rtol * fmax(fabs(l.imag), fabs(nl.imag))
    s += (xl.imag / sc) * (xl.imag / sc)
    sc = atol + rtol * fmax(fabs(z), fabs(nz))
    s += (xz / sc) * (xz / sc)
    return sqrt(s / 7.0)


def integrate_mean_field(pars, y0, double t0, double t1, double rtol,
                         double atol, double dt_max, double amp_limit,
                         double[::1] t_eval, double[:, ::1] out):
    """Same contract as the pure-Python kernel; see its docstring."""
    cdef Model m
    m.gamma_a = pars[0]; m.delta_a = pars[1]; m.chi = pars[2]
    m.om = pars[3] + 1j * pars[4]
    m.gamma_b = pars[5]; m.omega_b = pars[6]; m.g = pars[7]
    m.gamma_q = pars[8]; m.omega_q = pars[9]
    m.eps = pars[10] + 1j * pars[11]
    m.delta = pars[12]
    m.have_probe = (pars[10] != 0.0 or pars[11] != 0.0)

    cdef cplx a = y0[0] + 1j * y0[1]
    cdef cplx b = y0[2] + 1j * y0[3]
    cdef cplx l = y0[4] + 1j * y0[5]
    cdef double z = y0[6]

    cdef double t = t0
    cdef double span = t1 - t0
    cdef double min_step = 1e-15 * fmax(fmax(span, fabs(t1)), 1.0)
    cdef double amp_limit_sq = amp_limit * amp_limit

    cdef Py_ssize_t n_eval = t_eval.shape[0]
    cdef Py_ssize_t j = 0
    cdef long n_steps = 0
    cdef long n_rejected = 0
    cdef int status = ST_OK

    cdef cplx k1a, k1b, k1l
    cdef double k1z
    cdef cplx k2a, k2b, k2l, k3a, k3b, k3l, k4a, k4b, k4l
    cdef cplx k5a, k5b, k5l, k6a, k6b, k6l, k7a, k7b, k7l
    cdef double k2z, k3z, k4z, k5z, k6z, k7z
    cdef cplx na, nb, nl, ea, eb, el
    cdef double nz, ez
    cdef double h, err, factor, d0, d1

    with nogil:
        rhs(&m, t, a, b, l, z, &k1a, &k1b, &k1l, &k1z)

        # initial step from the local derivative scale
        d0 = scaled_norm(a, b, l, z, a, b, l, z, a, b, l, z, rtol, atol)
        d1 = scaled_norm(k1a, k1b, k1l, k1z, a, b, l, z, a, b, l, z, rtol, atol)
        if d1 > 0.0:
            h = 0.01 * d0 / d1
        else:
            h = span * 1e-6
        if h <= 0.0:
            h = span * 1e-6
        h = fmin(fmin(h, span), dt_max)

        while j < n_eval and t_eval[j] <= t + min_step:
            out[j, 0] = a.real; out[j, 1] = a.imag
            out[j, 2] = b.real; out[j, 3] = b.imag
            out[j, 4] = l.real; out[j, 5] = l.imag
            out[j, 6] = z
            j += 1

        while t < t1 - min_step:
            h = fmin(fmin(h, dt_max), t1 - t)
            if j < n_eval and t_eval[j] - t < h:
                h = t_eval[j] - t
            if h < min_step:
                status = ST_UNDERFLOW
                break

            rhs(&m, t + C2 * h,
                a + h * (A21 * k1a), b + h * (A21 * k1b),
                l + h * (A21 * k1l), z + h * (A21 * k1z),
                &k2a, &k2b, &k2l, &k2z)
            rhs(&m, t + C3 * h,
                a + h * (A31 * k1a + A32 * k2a),
                b + h * (A31 * k1b + A32 * k2b),
                l + h * (A31 * k1l + A32 * k2l),
                z + h * (A31 * k1z + A32 * k2z),
                &k3a, &k3b, &k3l, &k3z)
            rhs(&m, t + C4 * h,
                a + h * (A41 * k1a + A42 * k2a + A43 * k3a),
                b + h * (A41 * k1b + A42 * k2b + A43 * k3b),
                l + h * (A41 * k1l + A42 * k2l + A43 * k3l),
                z + h * (A41 * k1z + A42 * k2z + A43 * k3z),
                &k4a, &k4b, &k4l, &k4z)
            rhs(&m, t + C5 * h,
                a + h * (A51 * k1a + A52 * k2a + A53 * k3a + A54 * k4a),
                b + h * (A51 * k1b + A52 * k2b + A53 * k3b + A54 * k4b),
                l + h * (A51 * k1l + A52 * k2l + A53 * k3l + A54 * k4l),
                z + h * (A51 * k1z + A52 * k2z + A53 * k3z + A54 * k4z),
                &k5a, &k5b, &k5l, &k5z)
            rhs(&m, t + h,
                a + h * (A61 * k1a + A62 * k2a + A63 * k3a + A64 * k4a + A65 * k5a),
                b + h * (A61 * k1b + A62 * k2b + A63 * k3b + A64 * k4b + A65 * k5b),
                l + h * (A61 * k1l + A62 * k2l + A63 * k3l + A64 * k4l + A65 * k5l),
                z + h * (A61 * k1z + A62 * k2z + A63 * k3z + A64 * k4z + A65 * k5z),
                &k6a, &k6b, &k6l, &k6z)

            na = a + h * (B1 * k1a + B3 * k3a + B4 * k4a + B5 * k5a + B6 * k6a)
            nb = b + h * (B1 * k1b + B3 * k3b + B4 * k4b + B5 * k5b + B6 * k6b)
            nl = l + h * (B1 * k1l + B3 * k3l + B4 * k4l + B5 * k5l + B6 * k6l)
            nz = z + h * (B1 * k1z + B3 * k3z + B4 * k4z + B5 * k5z + B6 * k6z)

            rhs(&m, t + h, na, nb, nl, nz, &k7a, &k7b, &k7l, &k7z)

            ea = h * (E1 * k1a + E3 * k3a + E4 * k4a + E5 * k5a + E6 * k6a + E7 * k7a)
            eb = h * (E1 * k1b + E3 * k3b + E4 * k4b + E5 * k5b + E6 * k6b + E7 * k7b)
            el = h * (E1 * k1l + E3 * k3l + E4 * k4l + E5 * k5l + E6 * k6l + E7 * k7l)
            ez = h * (E1 * k1z + E3 * k3z + E4 * k4z + E5 * k5z + E6 * k6z + E7 * k7z)

            err = scaled_norm(ea, eb, el, ez, a, b, l, z, na, nb, nl, nz, rtol, atol)

            if err <= 1.0:
                t = t + h
                a = na; b = nb; l = nl; z = nz
                k1a = k7a; k1b = k7b; k1l = k7l; k1z = k7z
                n_steps += 1

                if a.real * a.real + a.imag * a.imag > amp_limit_sq:
                    status = ST_DIVERGED
                    break

                while j < n_eval and t_eval[j] <= t + min_step:
                    out[j, 0] = a.real; out[j, 1] = a.imag
                    out[j, 2] = b.real; out[j, 3] = b.imag
                    out[j, 4] = l.real; out[j, 5] = l.imag
                    out[j, 6] = z
                    j += 1

                if err == 0.0:
                    factor = MAX_FACTOR
                else:
                    factor = fmin(MAX_FACTOR,
                                  fmax(MIN_FACTOR, SAFETY * pow(err, -0.2)))
                h *= factor
            else:
                n_rejected += 1
                h *= fmax(MIN_FACTOR, SAFETY * pow(err, -0.2))

    return status, n_steps, n_rejected, t
