# cython: language_level=3, boundscheck=False, wraparound=False
# cython: cdivision=True
"""Cython kernels for the gamma-law isentropic gas model.

One-to-one mirror of pipetrack._kernels.reference (same signatures, same
algorithms, same error messages); see that module for the documentation.
The arithmetic is plain C doubles, so results agree with the reference
implementation to rounding.
"""
from libc.math cimport sqrt, pow, hypot, INFINITY

BACKEND = "compiled"

COND_KINK = 0
COND_SECTION_L = 1
COND_SECTION_P = 2
COND_SECTION_PZERO = 3
COND_SECTION_S = 4

cdef enum:
    _KINK_CODE = 0
    _SECTION_L = 1
    _SECTION_P = 2
    _SECTION_PZERO = 3
    _SECTION_S = 4


cdef inline double _pressure(double rho, double kappa, double gam):
    return kappa * pow(rho, gam)


cdef inline double _pressure_deriv(double rho, double kappa, double gam):
    return kappa * gam * pow(rho, gam - 1.0)


cdef inline double _sound_speed(double rho, double kappa, double gam):
    return sqrt(kappa * gam) * pow(rho, 0.5 * (gam - 1.0))


cdef inline double _rho_from_sound_speed(double c, double kappa,
                                         double gam):
    return pow(c * c / (kappa * gam), 1.0 / (gam - 1.0))


cdef inline double _total_momentum_flux(double rho, double q, double kappa,
                                        double gam):
    return q * q / rho + _pressure(rho, kappa, gam)


def pressure(double rho, double kappa, double gam):
    return _pressure(rho, kappa, gam)


def pressure_deriv(double rho, double kappa, double gam):
    return _pressure_deriv(rho, kappa, gam)


def sound_speed(double rho, double kappa, double gam):
    return _sound_speed(rho, kappa, gam)


def rho_from_sound_speed(double c, double kappa, double gam):
    return _rho_from_sound_speed(c, kappa, gam)


def eigenvalues(double rho, double q, double kappa, double gam):
    cdef double c = _sound_speed(rho, kappa, gam)
    cdef double v = q / rho
    return v - c, v + c


def total_momentum_flux(double rho, double q, double kappa, double gam):
    return _total_momentum_flux(rho, q, kappa, gam)


cdef int _lax_state(int family, double sigma, double rho0, double q0,
                    double kappa, double gam, double* rho_out,
                    double* q_out) except -1:
    cdef double k1, c0, sgn, c, rho, v0, v, p0, target
    cdef double lo, hi, val, h, der, step, r_new, v_new, dp
    cdef int i
    if sigma == 0.0:
        rho_out[0] = rho0
        q_out[0] = q0
        return 0
    k1 = (gam - 1.0) / (gam + 1.0)
    c0 = _sound_speed(rho0, kappa, gam)
    sgn = -1.0 if family == 1 else 1.0
    c = c0 + sgn * k1 * sigma
    if c <= 0.0:
        raise ValueError("wave parameter %g reaches vacuum" % sigma)
    rho = _rho_from_sound_speed(c, kappa, gam)
    v0 = q0 / rho0
    if sigma > 0.0:
        v = v0 + 2.0 * sigma / (gam + 1.0)
        rho_out[0] = rho
        q_out[0] = rho * v
        return 0

    p0 = _pressure(rho0, kappa, gam)
    target = v0 + sgn * c0 + sigma

    lo = rho0 if family == 1 else 0.0
    hi = INFINITY if family == 1 else rho0
    val = _hugoniot_lambda(rho, rho0, v0, p0, sgn, kappa, gam) - target
    for i in range(60):
        if abs(val) <= 1e-14 * (1.0 + abs(target)):
            break
        h = 1e-8 * rho0
        der = (_hugoniot_lambda(rho + h, rho0, v0, p0, sgn, kappa, gam)
               - _hugoniot_lambda(rho - h, rho0, v0, p0, sgn, kappa, gam)
               ) / (2.0 * h)
        step = val / der
        r_new = rho - step
        if not (lo < r_new < hi):
            r_new = 0.5 * (rho + (lo if step > 0.0
                                  else min(hi, 2.0 * rho)))
        v_new = (_hugoniot_lambda(r_new, rho0, v0, p0, sgn, kappa, gam)
                 - target)
        if abs(v_new) >= abs(val):
            r_new = 0.5 * (rho + r_new)
            v_new = (_hugoniot_lambda(r_new, rho0, v0, p0, sgn, kappa,
                                      gam) - target)
        rho = r_new
        val = v_new
    else:
        raise ValueError("shock-branch solve failed at sigma %g" % sigma)
    dp = _pressure(rho, kappa, gam) - p0
    v = v0 - sqrt(dp * (rho - rho0) / (rho * rho0))
    rho_out[0] = rho
    q_out[0] = rho * v
    return 0


cdef inline double _hugoniot_lambda(double r, double rho0, double v0,
                                    double p0, double sgn, double kappa,
                                    double gam):
    cdef double dp = _pressure(r, kappa, gam) - p0
    cdef double drho = r - rho0
    cdef double v_h = v0 - sqrt(dp * drho / (r * rho0))
    return v_h + sgn * _sound_speed(r, kappa, gam)


def lax_state(int family, double sigma, double rho0, double q0,
              double kappa, double gam):
    cdef double rho = 0.0, q = 0.0
    _lax_state(family, sigma, rho0, q0, kappa, gam, &rho, &q)
    return rho, q


def shock_speed_mass(double rho0, double q0, double rho1, double q1):
    return (q1 - q0) / (rho1 - rho0)


cdef int _solve2(double a11, double a12, double a21, double a22,
                 double b1, double b2, double* x1,
                 double* x2) except -1:
    cdef double det = a11 * a22 - a12 * a21
    if det == 0.0:
        raise ValueError("singular 2x2 system in wave-size solve")
    x1[0] = (b1 * a22 - b2 * a12) / det
    x2[0] = (a21 * b1 - a11 * b2) / (-det)
    return 0


cdef int _compose_plain(double s1, double s2, double rl, double ql,
                        double rr, double qr, double kappa, double gam,
                        double* f1, double* f2) except -1:
    cdef double rm = 0.0, qm = 0.0, r2 = 0.0, q2 = 0.0
    _lax_state(1, s1, rl, ql, kappa, gam, &rm, &qm)
    _lax_state(2, s2, rm, qm, kappa, gam, &r2, &q2)
    f1[0] = r2 - rr
    f2[0] = q2 - qr
    return 0


def riemann_sizes(double rl, double ql, double rr, double qr, double kappa,
                  double gam, double tol=1e-13, int max_iter=50,
                  double fd_step=1e-7):
    cdef double s1 = 0.0, s2 = 0.0
    cdef double f1 = 0.0, f2 = 0.0, g1 = 0.0, g2 = 0.0
    cdef double h1 = 0.0, h2 = 0.0, n1 = 0.0, n2 = 0.0
    cdef double a11, a12, a21, a22, d1 = 0.0, d2 = 0.0
    cdef double norm, nn, step, t1, t2
    cdef int it
    cdef bint improved
    _compose_plain(s1, s2, rl, ql, rr, qr, kappa, gam, &f1, &f2)
    norm = hypot(f1, f2)
    for it in range(max_iter):
        if norm <= tol:
            return s1, s2, it
        _compose_plain(s1 + fd_step, s2, rl, ql, rr, qr, kappa, gam,
                       &g1, &g2)
        _compose_plain(s1, s2 + fd_step, rl, ql, rr, qr, kappa, gam,
                       &h1, &h2)
        a11 = (g1 - f1) / fd_step
        a21 = (g2 - f2) / fd_step
        a12 = (h1 - f1) / fd_step
        a22 = (h2 - f2) / fd_step
        _solve2(a11, a12, a21, a22, f1, f2, &d1, &d2)
        step = 1.0
        improved = False
        while step > 2.0 ** -16:
            t1 = s1 - step * d1
            t2 = s2 - step * d2
            try:
                _compose_plain(t1, t2, rl, ql, rr, qr, kappa, gam,
                               &n1, &n2)
            except ValueError:
                step *= 0.5
                continue
            nn = hypot(n1, n2)
            if nn < norm:
                s1 = t1
                s2 = t2
                f1 = n1
                f2 = n2
                norm = nn
                improved = True
                break
            step *= 0.5
        if not improved:
            raise ValueError("wave-size iteration stalled at residual %g"
                             % norm)
    if norm <= tol:
        return s1, s2, max_iter
    raise ValueError("wave-size iteration failed to converge (residual %g)"
                     % norm)


cdef int _flux_inverse(double f1, double f2, double rho_start,
                       double kappa, double gam, double tol, int max_iter,
                       double* rho_out) except -1:
    cdef double rho = rho_start
    cdef double val, der, d, step, r_new, v_new
    cdef int i
    cdef bint improved
    val = f1 * f1 / rho + _pressure(rho, kappa, gam) - f2
    for i in range(max_iter):
        if abs(val) <= tol:
            break
        der = -f1 * f1 / (rho * rho) + _pressure_deriv(rho, kappa, gam)
        if der == 0.0:
            raise ValueError("flux inversion hit the sonic point")
        d = val / der
        step = 1.0
        improved = False
        while step > 2.0 ** -16:
            r_new = rho - step * d
            if r_new > 0.0:
                v_new = (f1 * f1 / r_new
                         + _pressure(r_new, kappa, gam) - f2)
                if abs(v_new) < abs(val):
                    rho = r_new
                    val = v_new
                    improved = True
                    break
            step *= 0.5
        if not improved:
            raise ValueError("flux inversion stalled at residual %g" % val)
    if abs(val) > tol:
        raise ValueError("flux inversion failed to converge (residual %g)"
                         % val)
    if -f1 * f1 / (rho * rho) + _pressure_deriv(rho, kappa, gam) <= 0.0:
        raise ValueError("flux inversion landed on the supersonic branch")
    rho_out[0] = rho
    return 0


def flux_inverse_subsonic(double f1, double f2, double rho_start,
                          double kappa, double gam, double tol=1e-12,
                          int max_iter=50):
    cdef double rho = 0.0
    _flux_inverse(f1, f2, rho_start, kappa, gam, tol, max_iter, &rho)
    return rho, f1


cdef double _stationary_rhs(double a, double rho, double c, double kappa,
                            double gam) except? -1.0:
    cdef double qa, v, denom
    if rho <= 0.0:
        raise ValueError("stationary profile reached vacuum")
    qa = c / a
    v = qa / rho
    denom = _pressure_deriv(rho, kappa, gam) - v * v
    if denom <= 0.0:
        raise ValueError("stationary profile crossed the sonic point")
    return qa * qa / (a * rho * denom)


cdef double _stationary_rho(double a0, double a1, double rho0, double q0,
                            double kappa, double gam,
                            int steps) except? -1.0:
    cdef double c, h, a, rho, k1, k2, k3, k4
    cdef int i
    if a0 <= 0.0 or a1 <= 0.0:
        raise ValueError("pipe area must stay positive")
    c = a0 * q0
    h = (a1 - a0) / steps
    a = a0
    rho = rho0
    for i in range(steps):
        k1 = _stationary_rhs(a, rho, c, kappa, gam)
        k2 = _stationary_rhs(a + 0.5 * h, rho + 0.5 * h * k1, c, kappa,
                             gam)
        k3 = _stationary_rhs(a + 0.5 * h, rho + 0.5 * h * k2, c, kappa,
                             gam)
        k4 = _stationary_rhs(a + h, rho + h * k3, c, kappa, gam)
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        a += h
    return rho


def stationary_rho(double a0, double a1, double rho0, double q0,
                   double kappa, double gam, int steps=512):
    return _stationary_rho(a0, a1, rho0, q0, kappa, gam, steps)


cdef int _xi_eval(int code, double p1, double p2, double rho, double q,
                  double kappa, double gam, int steps, double* xi1,
                  double* xi2) except -1:
    cdef double am, ap, r, rho1, q1
    if code == _KINK_CODE:
        xi1[0] = 0.0
        xi2[0] = -p1 * p2 * q
        return 0
    am = p1
    ap = p2
    r = am / ap
    xi1[0] = (r - 1.0) * q
    if code == _SECTION_L:
        xi2[0] = (r - 1.0) * _total_momentum_flux(rho, q, kappa, gam)
    elif code == _SECTION_P:
        xi2[0] = (r * r - 1.0) * q * q / rho
    elif code == _SECTION_PZERO:
        xi2[0] = 0.0
    elif code == _SECTION_S:
        rho1 = _stationary_rho(am, ap, rho, q, kappa, gam, steps)
        q1 = q * r
        xi2[0] = (_total_momentum_flux(rho1, q1, kappa, gam)
                  - _total_momentum_flux(rho, q, kappa, gam))
    else:
        raise ValueError("unknown coupling code %r" % (code,))
    return 0


def xi_eval(int code, double p1, double p2, double rho, double q,
            double kappa, double gam, int steps=64):
    cdef double xi1 = 0.0, xi2 = 0.0
    _xi_eval(code, p1, p2, rho, q, kappa, gam, steps, &xi1, &xi2)
    return xi1, xi2


cdef int _junction_state(int code, double p1, double p2, double rho,
                         double q, double kappa, double gam, int steps,
                         double tol, int max_iter, double* rho_out,
                         double* q_out) except -1:
    cdef double xi1 = 0.0, xi2 = 0.0, f1, f2, r = 0.0
    _xi_eval(code, p1, p2, rho, q, kappa, gam, steps, &xi1, &xi2)
    f1 = q + xi1
    f2 = _total_momentum_flux(rho, q, kappa, gam) + xi2
    _flux_inverse(f1, f2, rho, kappa, gam, tol, max_iter, &r)
    rho_out[0] = r
    q_out[0] = f1
    return 0


def junction_state(int code, double p1, double p2, double rho, double q,
                   double kappa, double gam, int steps=64,
                   double tol=1e-12, int max_iter=50):
    cdef double r = 0.0, f = 0.0
    _junction_state(code, p1, p2, rho, q, kappa, gam, steps, tol,
                    max_iter, &r, &f)
    return r, f


cdef int _compose_junction(double s1, double s2, double rl, double ql,
                           double rr, double qr, int code, double p1,
                           double p2, double kappa, double gam, int steps,
                           double tol, int max_iter, double* f1,
                           double* f2) except -1:
    cdef double rm = 0.0, qm = 0.0, rt = 0.0, qt = 0.0
    cdef double r2 = 0.0, q2 = 0.0
    _lax_state(1, s1, rl, ql, kappa, gam, &rm, &qm)
    _junction_state(code, p1, p2, rm, qm, kappa, gam, steps, tol,
                    max_iter, &rt, &qt)
    _lax_state(2, s2, rt, qt, kappa, gam, &r2, &q2)
    f1[0] = r2 - rr
    f2[0] = q2 - qr
    return 0


def generalized_sizes(double rl, double ql, double rr, double qr, int code,
                      double p1, double p2, double kappa, double gam,
                      int steps=64, double tol=1e-13, int max_iter=50,
                      double fd_step=1e-7):
    cdef double s1 = 0.0, s2 = 0.0
    cdef double f1 = 0.0, f2 = 0.0, g1 = 0.0, g2 = 0.0
    cdef double h1 = 0.0, h2 = 0.0, n1 = 0.0, n2 = 0.0
    cdef double a11, a12, a21, a22, d1 = 0.0, d2 = 0.0
    cdef double norm, nn, step, t1, t2
    cdef int it
    cdef bint improved
    _compose_junction(s1, s2, rl, ql, rr, qr, code, p1, p2, kappa, gam,
                      steps, tol, max_iter, &f1, &f2)
    norm = hypot(f1, f2)
    for it in range(max_iter):
        if norm <= tol:
            return s1, s2, it
        _compose_junction(s1 + fd_step, s2, rl, ql, rr, qr, code, p1, p2,
                          kappa, gam, steps, tol, max_iter, &g1, &g2)
        _compose_junction(s1, s2 + fd_step, rl, ql, rr, qr, code, p1, p2,
                          kappa, gam, steps, tol, max_iter, &h1, &h2)
        a11 = (g1 - f1) / fd_step
        a21 = (g2 - f2) / fd_step
        a12 = (h1 - f1) / fd_step
        a22 = (h2 - f2) / fd_step
        _solve2(a11, a12, a21, a22, f1, f2, &d1, &d2)
        step = 1.0
        improved = False
        while step > 2.0 ** -16:
            t1 = s1 - step * d1
            t2 = s2 - step * d2
            try:
                _compose_junction(t1, t2, rl, ql, rr, qr, code, p1, p2,
                                  kappa, gam, steps, tol, max_iter,
                                  &n1, &n2)
            except ValueError:
                step *= 0.5
                continue
            nn = hypot(n1, n2)
            if nn < norm:
                s1 = t1
                s2 = t2
                f1 = n1
                f2 = n2
                norm = nn
                improved = True
                break
            step *= 0.5
        if not improved:
            raise ValueError(
                "junction wave-size iteration stalled at residual %g"
                % norm)
    if norm <= tol:
        return s1, s2, max_iter
    raise ValueError(
        "junction wave-size iteration failed to converge (residual %g)"
        % norm)
