"""Pure-Python kernels for the gamma-law isentropic gas model.

State is (rho, q) = (density, momentum) with pressure p = kappa * rho**gam.
Everything here is scalar arithmetic on purpose: these routines sit inside
the front-tracking event loop and are mirrored one-to-one by the Cython
extension in compiled.pyx, so the two backends stay interchangeable.

Wave-size convention: each family is parametrized so that the
characteristic speed of the family increases at unit rate along the curve
(sigma > 0 gives rarefactions, sigma < 0 shocks).
"""
import math

BACKEND = "python"

# Coupling-condition codes shared with the compiled backend.
COND_KINK = 0
COND_SECTION_L = 1   # momentum-flux-preserving section jump
COND_SECTION_P = 2   # kinetic correction with squared area ratio
COND_SECTION_PZERO = 3  # no momentum correction at all
COND_SECTION_S = 4   # stationary-profile-consistent correction


def pressure(rho, kappa, gam):
    return kappa * rho ** gam


def pressure_deriv(rho, kappa, gam):
    return kappa * gam * rho ** (gam - 1.0)


def sound_speed(rho, kappa, gam):
    return math.sqrt(kappa * gam) * rho ** (0.5 * (gam - 1.0))


def rho_from_sound_speed(c, kappa, gam):
    return (c * c / (kappa * gam)) ** (1.0 / (gam - 1.0))


def eigenvalues(rho, q, kappa, gam):
    c = sound_speed(rho, kappa, gam)
    v = q / rho
    return v - c, v + c


def total_momentum_flux(rho, q, kappa, gam):
    return q * q / rho + pressure(rho, kappa, gam)


def lax_state(family, sigma, rho0, q0, kappa, gam):
    """State on the Lax curve of `family` (1 or 2) at parameter sigma.

    The parameter is the change of the family's characteristic speed
    along the curve, on both branches: closed form on the rarefaction
    side (sigma > 0), scalar Newton on the Hugoniot side (sigma < 0,
    seeded with the isentropic density, which agrees to third order).
    Raises ValueError when the parameter runs into vacuum.
    """
    if sigma == 0.0:
        return rho0, q0
    k1 = (gam - 1.0) / (gam + 1.0)
    c0 = sound_speed(rho0, kappa, gam)
    sgn = -1.0 if family == 1 else 1.0
    c = c0 + sgn * k1 * sigma
    if c <= 0.0:
        raise ValueError("wave parameter %g reaches vacuum" % sigma)
    rho = rho_from_sound_speed(c, kappa, gam)
    v0 = q0 / rho0
    if sigma > 0.0:
        v = v0 + 2.0 * sigma / (gam + 1.0)
        return rho, rho * v

    p0 = pressure(rho0, kappa, gam)
    target = v0 + sgn * c0 + sigma  # lambda_family(u0) + sigma

    def lam(r):
        dp = pressure(r, kappa, gam) - p0
        drho = r - rho0
        v_h = v0 - math.sqrt(dp * drho / (r * rho0))
        return v_h + sgn * sound_speed(r, kappa, gam)

    # shock branch: density rises for family 1, falls for family 2
    lo = rho0 if family == 1 else 0.0
    hi = float("inf") if family == 1 else rho0
    val = lam(rho) - target
    for _ in range(60):
        if abs(val) <= 1e-14 * (1.0 + abs(target)):
            break
        h = 1e-8 * rho0
        der = (lam(rho + h) - lam(rho - h)) / (2.0 * h)
        step = val / der
        r_new = rho - step
        if not (lo < r_new < hi):
            r_new = 0.5 * (rho + (lo if step > 0.0 else min(hi, 2.0 * rho)))
        v_new = lam(r_new) - target
        if abs(v_new) >= abs(val):
            r_new = 0.5 * (rho + r_new)
            v_new = lam(r_new) - target
        rho, val = r_new, v_new
    else:
        raise ValueError("shock-branch solve failed at sigma %g" % sigma)
    dp = pressure(rho, kappa, gam) - p0
    v = v0 - math.sqrt(dp * (rho - rho0) / (rho * rho0))
    return rho, rho * v


def shock_speed_mass(rho0, q0, rho1, q1):
    """Propagation speed from the mass jump condition (exact for shocks)."""
    return (q1 - q0) / (rho1 - rho0)


def _solve2(a11, a12, a21, a22, b1, b2):
    det = a11 * a22 - a12 * a21
    if det == 0.0:
        raise ValueError("singular 2x2 system in wave-size solve")
    return (b1 * a22 - b2 * a12) / det, (a21 * b1 - a11 * b2) / (-det)


def riemann_sizes(rl, ql, rr, qr, kappa, gam, tol=1e-13, max_iter=50,
                  fd_step=1e-7):
    """Wave sizes (s1, s2) joining (rl,ql) to (rr,qr) by a 1- then 2-wave.

    Damped Newton iteration on the curve composition; the Jacobian is
    formed by forward differences.  Returns (s1, s2, iterations).
    """

    def compose(s1, s2):
        rm, qm = lax_state(1, s1, rl, ql, kappa, gam)
        r2, q2 = lax_state(2, s2, rm, qm, kappa, gam)
        return r2 - rr, q2 - qr

    s1 = 0.0
    s2 = 0.0
    f1, f2 = compose(s1, s2)
    norm = math.hypot(f1, f2)
    for it in range(max_iter):
        if norm <= tol:
            return s1, s2, it
        g1, g2 = compose(s1 + fd_step, s2)
        h1, h2 = compose(s1, s2 + fd_step)
        a11 = (g1 - f1) / fd_step
        a21 = (g2 - f2) / fd_step
        a12 = (h1 - f1) / fd_step
        a22 = (h2 - f2) / fd_step
        d1, d2 = _solve2(a11, a12, a21, a22, f1, f2)
        step = 1.0
        while step > 2.0 ** -16:
            t1 = s1 - step * d1
            t2 = s2 - step * d2
            try:
                n1, n2 = compose(t1, t2)
            except ValueError:
                step *= 0.5
                continue
            nn = math.hypot(n1, n2)
            if nn < norm:
                s1, s2, f1, f2, norm = t1, t2, n1, n2, nn
                break
            step *= 0.5
        else:
            raise ValueError("wave-size iteration stalled at residual %g"
                             % norm)
    if norm <= tol:
        return s1, s2, max_iter
    raise ValueError("wave-size iteration failed to converge (residual %g)"
                     % norm)


def flux_inverse_subsonic(f1, f2, rho_start, kappa, gam, tol=1e-12,
                          max_iter=50):
    """Subsonic state (rho, q) with flux (f1, f2): q = f1 and
    f1**2/rho + p(rho) = f2.

    Damped Newton on rho from rho_start.  The subsonic branch is the one
    where d/drho of the momentum flux is positive; convergence onto the
    supersonic branch is reported as an error.
    """
    rho = rho_start

    def g(r):
        return f1 * f1 / r + pressure(r, kappa, gam) - f2

    def dg(r):
        return -f1 * f1 / (r * r) + pressure_deriv(r, kappa, gam)

    val = g(rho)
    for _ in range(max_iter):
        if abs(val) <= tol:
            break
        der = dg(rho)
        if der == 0.0:
            raise ValueError("flux inversion hit the sonic point")
        d = val / der
        step = 1.0
        while step > 2.0 ** -16:
            r_new = rho - step * d
            if r_new > 0.0:
                v_new = g(r_new)
                if abs(v_new) < abs(val):
                    rho, val = r_new, v_new
                    break
            step *= 0.5
        else:
            raise ValueError("flux inversion stalled at residual %g" % val)
    if abs(val) > tol:
        raise ValueError("flux inversion failed to converge (residual %g)"
                         % val)
    if dg(rho) <= 0.0:
        raise ValueError("flux inversion landed on the supersonic branch")
    return rho, f1


def stationary_rho(a0, a1, rho0, q0, kappa, gam, steps=512):
    """Density at area a1 along the smooth stationary balance, starting
    from (rho0, q0) at area a0.

    Along the profile a*q is constant, so only the density ODE
    d rho / da = q(a)**2 / (a * rho * (p'(rho) - (q(a)/rho)**2))
    is integrated (classical RK4, fixed step count).  Raises ValueError
    on a sonic transition.
    """
    if a0 <= 0.0 or a1 <= 0.0:
        raise ValueError("pipe area must stay positive")
    c = a0 * q0  # conserved linear flow rate

    def rhs(a, rho):
        if rho <= 0.0:
            raise ValueError("stationary profile reached vacuum")
        qa = c / a
        v = qa / rho
        denom = pressure_deriv(rho, kappa, gam) - v * v
        if denom <= 0.0:
            raise ValueError("stationary profile crossed the sonic point")
        return qa * qa / (a * rho * denom)

    h = (a1 - a0) / steps
    a = a0
    rho = rho0
    for _ in range(steps):
        k1 = rhs(a, rho)
        k2 = rhs(a + 0.5 * h, rho + 0.5 * h * k1)
        k3 = rhs(a + 0.5 * h, rho + 0.5 * h * k2)
        k4 = rhs(a + h, rho + h * k3)
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        a += h
    return rho


def xi_eval(code, p1, p2, rho, q, kappa, gam, steps=64):
    """Flux correction (xi1, xi2) carried by a geometry jump, evaluated at
    the state (rho, q) on its left.

    code selects the built-in condition; p1/p2 are its parameters:
      COND_KINK:        p1 = drag coefficient, p2 = |tangent jump|
      COND_SECTION_*:   p1 = area left, p2 = area right
    """
    if code == COND_KINK:
        return 0.0, -p1 * p2 * q
    am, ap = p1, p2
    r = am / ap
    xi1 = (r - 1.0) * q
    if code == COND_SECTION_L:
        xi2 = (r - 1.0) * total_momentum_flux(rho, q, kappa, gam)
    elif code == COND_SECTION_P:
        xi2 = (r * r - 1.0) * q * q / rho
    elif code == COND_SECTION_PZERO:
        xi2 = 0.0
    elif code == COND_SECTION_S:
        # Equivalent to the area-averaged pressure integral along the
        # stationary profile: integrating d(alpha * P)/d alpha = p(R(alpha))
        # by parts collapses the correction to a difference of momentum
        # fluxes between the profile endpoints.
        rho1 = stationary_rho(am, ap, rho, q, kappa, gam, steps)
        q1 = q * r
        xi2 = (total_momentum_flux(rho1, q1, kappa, gam)
               - total_momentum_flux(rho, q, kappa, gam))
    else:
        raise ValueError("unknown coupling code %r" % (code,))
    return xi1, xi2


def junction_state(code, p1, p2, rho, q, kappa, gam, steps=64, tol=1e-12,
                   max_iter=50):
    """State on the right of a geometry jump given the state on its left:
    the flux of the result equals flux(left) + xi."""
    xi1, xi2 = xi_eval(code, p1, p2, rho, q, kappa, gam, steps)
    f1 = q + xi1
    f2 = total_momentum_flux(rho, q, kappa, gam) + xi2
    return flux_inverse_subsonic(f1, f2, rho, kappa, gam, tol, max_iter)


def generalized_sizes(rl, ql, rr, qr, code, p1, p2, kappa, gam,
                      steps=64, tol=1e-13, max_iter=50, fd_step=1e-7):
    """Wave sizes (s1, s2) for the junction Riemann problem: a 1-wave on
    the left of the geometry jump, the flux-correction transfer across it,
    then a 2-wave.  Returns (s1, s2, iterations)."""

    def compose(s1, s2):
        rm, qm = lax_state(1, s1, rl, ql, kappa, gam)
        rt, qt = junction_state(code, p1, p2, rm, qm, kappa, gam, steps,
                                tol, max_iter)
        r2, q2 = lax_state(2, s2, rt, qt, kappa, gam)
        return r2 - rr, q2 - qr

    s1 = 0.0
    s2 = 0.0
    f1, f2 = compose(s1, s2)
    norm = math.hypot(f1, f2)
    for it in range(max_iter):
        if norm <= tol:
            return s1, s2, it
        g1, g2 = compose(s1 + fd_step, s2)
        h1, h2 = compose(s1, s2 + fd_step)
        a11 = (g1 - f1) / fd_step
        a21 = (g2 - f2) / fd_step
        a12 = (h1 - f1) / fd_step
        a22 = (h2 - f2) / fd_step
        d1, d2 = _solve2(a11, a12, a21, a22, f1, f2)
        step = 1.0
        while step > 2.0 ** -16:
            t1 = s1 - step * d1
            t2 = s2 - step * d2
            try:
                n1, n2 = compose(t1, t2)
            except ValueError:
                step *= 0.5
                continue
            nn = math.hypot(n1, n2)
            if nn < norm:
                s1, s2, f1, f2, norm = t1, t2, n1, n2, nn
                break
            step *= 0.5
        else:
            raise ValueError(
                "junction wave-size iteration stalled at residual %g" % norm)
    if norm <= tol:
        return s1, s2, max_iter
    raise ValueError(
        "junction wave-size iteration failed to converge (residual %g)"
        % norm)
