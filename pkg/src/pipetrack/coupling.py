"""Coupling conditions carried by jumps of the pipe geometry.

A coupling condition maps (z_plus, z_minus, u) to the flux correction a
standing junction wave imposes between the gas on its two sides:
f(u_plus) = f(u_minus) + condition(z_plus, z_minus, u_minus).  The library
covers kinked pipes (geometry value = unit tangent vector), pipes with a
varying cross-section (geometry value = area), and generic conservative
products built from a potential G.

Every condition exposes `evaluate`, the one-sided directional derivative
`dini`, and a smoothness tag; `junction_map` and `stationary_profile`
realize the transfer across a jump and the smooth stationary balance.
"""
import math

import numpy as np

from . import _kernels
from .errors import (JunctionSolvabilityError, SonicTransitionError)
from .models import EulerModel, GammaLaw, IsentropicModel

_K = _kernels.impl

DIFFERENTIABLE = "differentiable-in-z"
DINI_ONLY = "dini-only"


def _scalar(z):
    """Accept plain floats or length-1 vectors for scalar geometry values."""
    arr = np.asarray(z, dtype=float).reshape(-1)
    return float(arr[0])


class CouplingCondition:
    """Base interface: flux correction at a geometry jump."""

    smoothness = DIFFERENTIABLE
    parameter_dim = 1
    flux_dim = 2

    def evaluate(self, z_plus, z_minus, u):
        raise NotImplementedError

    def dini(self, z, direction, u):
        """One-sided derivative t -> evaluate(z + t*direction, z, u) at
        t = 0+."""
        raise NotImplementedError

    def __call__(self, z_plus, z_minus, u):
        return self.evaluate(z_plus, z_minus, u)

    def kernel_args(self, z_plus, z_minus):
        """(code, p1, p2) for the scalar kernels, or None when this
        condition has no compiled fast path."""
        return None


class KinkCondition(CouplingCondition):
    """Momentum drag at a kink of the pipe axis.

    Geometry values are unit tangent vectors; the correction is
    (0, K(|z_plus - z_minus|, u)) where the default drag model is
    K(eta, u) = -alpha * eta * q.  A custom drag callable K(eta, u) with
    K(0, u) = 0 may be supplied instead.
    """

    smoothness = DINI_ONLY
    parameter_dim = 2
    flux_dim = 2

    def __init__(self, alpha=0.5, drag=None):
        self.alpha = alpha
        self.drag = drag
        if drag is not None:
            for q in (-0.5, 0.0, 0.3, 1.0):
                u = np.array([1.0, q])
                if abs(drag(0.0, u)) > 1e-14:
                    raise ValueError("drag model must vanish at zero angle "
                                     "gap (got %g)" % drag(0.0, u))

    def evaluate(self, z_plus, z_minus, u):
        eta = float(np.linalg.norm(np.asarray(z_plus, float)
                                   - np.asarray(z_minus, float)))
        if self.drag is not None:
            return np.array([0.0, self.drag(eta, u)])
        return np.array([0.0, -self.alpha * eta * u[1]])

    def dini(self, z, direction, u):
        speed = float(np.linalg.norm(np.asarray(direction, float)))
        if self.drag is not None:
            t = 1e-7
            slope = (self.drag(t, u) - self.drag(0.0, u)) / t
            return np.array([0.0, slope * speed])
        return np.array([0.0, -self.alpha * u[1] * speed])

    def kernel_args(self, z_plus, z_minus):
        if self.drag is not None:
            return None
        eta = float(np.linalg.norm(np.asarray(z_plus, float)
                                   - np.asarray(z_minus, float)))
        return (_K.COND_KINK, self.alpha, eta)


_SECTION_CODES = {
    "L": _K.COND_SECTION_L,
    "p": _K.COND_SECTION_P,
    "P": _K.COND_SECTION_PZERO,
    "S": _K.COND_SECTION_S,
}


class SectionCondition(CouplingCondition):
    """Flux correction at a cross-section jump a_minus -> a_plus.

    The mass component is always (a_minus/a_plus - 1) * q, which makes
    a*q continuous across the jump.  The momentum component depends on
    the variant:

      'L'  scales the full momentum flux by the area ratio, so
           a*(q^2/rho + p) is continuous;
      'p'  applies the kinetic correction ((a-/a+)^2 - 1) q^2/rho;
      'P'  leaves the momentum flux unchanged;
      'S'  matches the smooth stationary balance: the correction equals
           the area-averaged pressure integral along the stationary
           profile between the two sections.  Integrating that integral
           by parts along the profile collapses it to the difference of
           momentum fluxes between the profile endpoints, which is how
           it is evaluated here (`simpson_quadrature` evaluates the
           integral form directly for cross-checking).
    """

    smoothness = DIFFERENTIABLE
    parameter_dim = 1
    flux_dim = 2

    def __init__(self, variant, pressure=None, profile_steps=64,
                 area_floor=1e-6):
        if variant not in _SECTION_CODES:
            raise ValueError("unknown section variant %r (use L, p, P or S)"
                             % (variant,))
        self.variant = variant
        self.pressure = pressure if pressure is not None else GammaLaw()
        self.profile_steps = int(profile_steps)
        self.area_floor = float(area_floor)
        self._gamma_fast = isinstance(self.pressure, GammaLaw)

    def _areas(self, z_plus, z_minus):
        am, ap = _scalar(z_minus), _scalar(z_plus)
        if am < self.area_floor or ap < self.area_floor:
            raise ValueError("pipe area below floor %g" % self.area_floor)
        return am, ap

    def _momentum_flux(self, rho, q):
        return q * q / rho + self.pressure(rho)

    def evaluate(self, z_plus, z_minus, u):
        am, ap = self._areas(z_plus, z_minus)
        rho, q = float(u[0]), float(u[1])
        if self._gamma_fast:
            try:
                xi1, xi2 = _K.xi_eval(_SECTION_CODES[self.variant], am, ap,
                                      rho, q, self.pressure.kappa,
                                      self.pressure.gamma,
                                      self.profile_steps)
            except ValueError as exc:
                raise SonicTransitionError(str(exc)) from exc
            return np.array([xi1, xi2])
        r = am / ap
        xi1 = (r - 1.0) * q
        if self.variant == "L":
            xi2 = (r - 1.0) * self._momentum_flux(rho, q)
        elif self.variant == "p":
            xi2 = (r * r - 1.0) * q * q / rho
        elif self.variant == "P":
            xi2 = 0.0
        else:
            try:
                rho1 = _stationary_rho_generic(self.pressure, am, ap,
                                               rho, q, self.profile_steps)
            except ValueError as exc:
                raise SonicTransitionError(str(exc)) from exc
            xi2 = (self._momentum_flux(rho1, q * r)
                   - self._momentum_flux(rho, q))
        return np.array([xi1, xi2])

    def dini(self, z, direction, u):
        a = _scalar(z)
        v = _scalar(direction)
        rho, q = float(u[0]), float(u[1])
        d1 = -q / a
        if self.variant == "L":
            d2 = -self._momentum_flux(rho, q) / a
        elif self.variant == "p":
            d2 = -2.0 * q * q / (rho * a)
        elif self.variant == "P":
            d2 = 0.0
        else:
            d2 = -q * q / (rho * a)
        return v * np.array([d1, d2])

    def simpson_quadrature(self, z_plus, z_minus, u, tol=1e-10):
        """Momentum correction of variant 'S' in its integral form:
        (a-/a+ - 1) * momentum_flux(u) + (1/a+) * integral of p(R(area))
        along the stationary profile, by composite Simpson quadrature on
        the integrator grid, doubling steps until the value settles
        below tol.  Exists as an independent route for testing the
        closed-form evaluation."""
        if self.variant != "S":
            raise ValueError("quadrature form only applies to variant S")
        am, ap = self._areas(z_plus, z_minus)
        rho, q = float(u[0]), float(u[1])
        steps = max(self.profile_steps, 8)
        prev = None
        for _ in range(12):
            integral = self._profile_pressure_integral(am, ap, rho, q, steps)
            xi2 = (am / ap - 1.0) * self._momentum_flux(rho, q) \
                + integral / ap
            if prev is not None and abs(xi2 - prev) < tol:
                return xi2
            prev = xi2
            steps *= 2
        return prev

    def _profile_pressure_integral(self, am, ap, rho, q, steps):
        """Composite-Simpson integral of p(R(area)) over [a-, a+] along
        the stationary profile (steps must be even)."""
        if steps % 2:
            steps += 1
        flow = am * q
        h = (ap - am) / steps
        pvals = np.empty(steps + 1)
        a, r = am, rho
        pvals[0] = self.pressure(rho)
        for k in range(steps):
            r = _stationary_rho_step(self.pressure, a, r, flow, h)
            a = am + (k + 1) * h
            pvals[k + 1] = self.pressure(r)
        weights = np.ones(steps + 1)
        weights[1:-1:2] = 4.0
        weights[2:-1:2] = 2.0
        return float(np.dot(weights, pvals)) * h / 3.0

    def kernel_args(self, z_plus, z_minus):
        if not self._gamma_fast:
            return None
        am, ap = self._areas(z_plus, z_minus)
        return (_SECTION_CODES[self.variant], am, ap)


def section_derivative_comparison(model, states=((1.0, 0.2), (1.1, 0.15),
                                                 (0.9, 0.3)),
                                  area=1.0, fd_step=1e-6):
    """Downstream-area derivative of the momentum correction at equal
    areas, for every cross-section variant: the closed form against a
    central finite difference of the correction.  Returns one row per
    (variant, state) as a dict."""
    rows = []
    t = float(fd_step)
    a = float(area)
    for variant in ("L", "p", "P", "S"):
        cond = make_section_condition(variant, pressure=model.pressure)
        for s in states:
            u = np.asarray(s, dtype=float)
            rho, q = float(u[0]), float(u[1])
            closed = {
                "L": -(q * q / rho + float(model.pressure(rho))) / a,
                "p": -2.0 * q * q / (rho * a),
                "P": 0.0,
                "S": -q * q / (rho * a),
            }[variant]
            fd = (cond.evaluate([a + t], [a], u)[1]
                  - cond.evaluate([a - t], [a], u)[1]) / (2.0 * t)
            rows.append({"variant": variant, "rho": rho, "q": q, "area": a,
                         "closed_form": closed,
                         "finite_difference": float(fd),
                         "abs_error": abs(float(fd) - closed)})
    return rows


class ProductCondition(CouplingCondition):
    """Correction of potential form: evaluate = G(z_plus, u) - G(z_minus, u).

    When G does not depend on u this reproduces a conservative source
    d/dx of G(geometry(x)).  The directional derivative defaults to a
    central finite difference of G; an analytic d_z G may be supplied.
    """

    smoothness = DIFFERENTIABLE

    def __init__(self, potential, parameter_dim=1, flux_dim=2,
                 potential_gradient=None):
        self.potential = potential
        self.parameter_dim = parameter_dim
        self.flux_dim = flux_dim
        self.potential_gradient = potential_gradient

    def evaluate(self, z_plus, z_minus, u):
        return (np.asarray(self.potential(z_plus, u), dtype=float)
                - np.asarray(self.potential(z_minus, u), dtype=float))

    def dini(self, z, direction, u):
        if self.potential_gradient is not None:
            grad = np.asarray(self.potential_gradient(z, u), dtype=float)
            vec = np.asarray(direction, dtype=float).reshape(-1)
            return grad.reshape(self.flux_dim, -1) @ vec
        z = np.asarray(z, dtype=float)
        v = np.asarray(direction, dtype=float)
        t = 1e-6
        hi = np.asarray(self.potential(z + t * v, u), dtype=float)
        lo = np.asarray(self.potential(z - t * v, u), dtype=float)
        return (hi - lo) / (2.0 * t)


def make_kink_condition(alpha=0.5, drag=None):
    return KinkCondition(alpha=alpha, drag=drag)


def make_section_condition(variant, pressure=None, profile_steps=64):
    return SectionCondition(variant, pressure=pressure,
                            profile_steps=profile_steps)


def make_product_condition(potential, parameter_dim=1, flux_dim=2,
                           potential_gradient=None):
    return ProductCondition(potential, parameter_dim=parameter_dim,
                            flux_dim=flux_dim,
                            potential_gradient=potential_gradient)


# -- transfer across a jump ------------------------------------------------

def junction_map(model, cond, z_plus, z_minus, u_minus, tol=1e-12,
                 max_iter=50, z_radius=0.5):
    """State u_plus on the right of a geometry jump:
    f(u_plus) = f(u_minus) + cond(z_plus, z_minus, u_minus).

    Damped Newton from u_minus; the root must stay in the subsonic
    (non-characteristic) set, which selects the branch of the local flux
    inverse around the reference state.
    """
    dz = float(np.linalg.norm(np.asarray(z_plus, float).reshape(-1)
                              - np.asarray(z_minus, float).reshape(-1)))
    if 0.5 * dz > z_radius:
        # both endpoints must stay within z_radius of the jump midpoint
        raise JunctionSolvabilityError(
            "geometry jump %.3g exceeds the validated radius %.3g around "
            "its midpoint" % (dz, z_radius))
    if not model.is_noncharacteristic(u_minus):
        raise JunctionSolvabilityError(
            "state on the left of the junction is not subsonic: %s"
            % (np.asarray(u_minus),))

    if (isinstance(model, IsentropicModel) and model._gamma_fast):
        ka = cond.kernel_args(z_plus, z_minus)
        if ka is not None:
            code, p1, p2 = ka
            try:
                rho, q = _K.junction_state(
                    code, p1, p2, float(u_minus[0]), float(u_minus[1]),
                    model.pressure.kappa, model.pressure.gamma,
                    getattr(cond, "profile_steps", 64), tol, max_iter)
            except ValueError as exc:
                raise JunctionSolvabilityError(str(exc)) from exc
            out = np.array([rho, q])
            if not model.is_noncharacteristic(out):
                raise JunctionSolvabilityError(
                    "transfer left the subsonic region at %s" % out)
            return out

    target = model.flux(u_minus) + cond.evaluate(z_plus, z_minus, u_minus)
    u = np.asarray(u_minus, dtype=float).copy()
    res = model.flux(u) - target
    norm = float(np.linalg.norm(res))
    for _ in range(max_iter):
        if norm <= tol:
            break
        jac = model.flux_jacobian(u)
        try:
            d = np.linalg.solve(jac, res)
        except np.linalg.LinAlgError as exc:
            raise JunctionSolvabilityError(
                "flux Jacobian singular during transfer solve") from exc
        step = 1.0
        while step > 2.0 ** -16:
            u_new = u - step * d
            if u_new[0] > 0.0:
                r_new = model.flux(u_new) - target
                n_new = float(np.linalg.norm(r_new))
                if n_new < norm:
                    u, res, norm = u_new, r_new, n_new
                    break
            step *= 0.5
        else:
            raise JunctionSolvabilityError(
                "transfer Newton stalled at residual %g" % norm)
    if norm > tol:
        raise JunctionSolvabilityError(
            "transfer Newton failed to converge (residual %g)" % norm)
    if not model.is_noncharacteristic(u):
        raise JunctionSolvabilityError(
            "transfer converged outside the subsonic region: %s" % u)
    return u


# -- stationary profiles ---------------------------------------------------

def _stationary_rho_step(pressure, a, rho, flow, h):
    """One RK4 step of the stationary density equation
    d rho/d a = q^2 / (a rho (p'(rho) - v^2)) with q = flow / a."""

    def rhs(a_, r_):
        if r_ <= 0.0:
            raise SonicTransitionError("stationary profile reached vacuum")
        q = flow / a_
        v = q / r_
        denom = pressure.derivative(r_) - v * v
        if denom <= 0.0:
            raise SonicTransitionError(
                "stationary profile crossed the sonic point at area %g" % a_)
        return q * q / (a_ * r_ * denom)

    k1 = rhs(a, rho)
    k2 = rhs(a + 0.5 * h, rho + 0.5 * h * k1)
    k3 = rhs(a + 0.5 * h, rho + 0.5 * h * k2)
    k4 = rhs(a + h, rho + h * k3)
    return rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _stationary_rho_generic(pressure, a0, a1, rho0, q0, steps):
    flow = a0 * q0
    h = (a1 - a0) / steps
    rho = rho0
    for k in range(steps):
        rho = _stationary_rho_step(pressure, a0 + k * h, rho, flow, h)
    return rho


def stationary_profile(model, area_start, area_end, state, steps=512,
                       return_samples=False):
    """State of the smooth stationary balance at area_end, integrating in
    the area variable from (area_start, state).

    For the isentropic model a*q is an exact first integral, so only the
    density equation is integrated (RK4).  For the Euler model the three
    primitive equations are integrated jointly by RK4; mass and energy
    fluxes are then conserved to integration accuracy, which the test
    suite checks rather than enforces.
    """
    if area_start <= 0.0 or area_end <= 0.0:
        raise ValueError("pipe areas must be positive")
    u = np.asarray(state, dtype=float)
    if not model.is_noncharacteristic(u):
        raise SonicTransitionError("profile start state is not subsonic")
    if isinstance(model, IsentropicModel):
        return _stationary_profile_isentropic(model, area_start, area_end,
                                              u, steps, return_samples)
    if isinstance(model, EulerModel):
        return _stationary_profile_euler(model, area_start, area_end, u,
                                         steps, return_samples)
    raise TypeError("no stationary profile for model %r" % (model,))


def _stationary_profile_isentropic(model, a0, a1, u, steps, return_samples):
    rho0, q0 = float(u[0]), float(u[1])
    flow = a0 * q0
    samples = [(a0, np.array([rho0, q0]))]
    if model._gamma_fast and not return_samples:
        try:
            rho = _K.stationary_rho(a0, a1, rho0, q0, model.pressure.kappa,
                                    model.pressure.gamma, steps)
        except ValueError as exc:
            raise SonicTransitionError(str(exc)) from exc
        return np.array([rho, flow / a1])
    h = (a1 - a0) / steps
    rho = rho0
    for k in range(steps):
        rho = _stationary_rho_step(model.pressure, a0 + k * h, rho, flow, h)
        if return_samples:
            a = a0 + (k + 1) * h
            samples.append((a, np.array([rho, flow / a])))
    if return_samples:
        return samples
    return np.array([rho, flow / a1])


def _stationary_profile_euler(model, a0, a1, u, steps, return_samples):
    """RK4 on (rho, v, p) with
       rho' = rho v^2 / (a (c^2 - v^2)),
       v'   = -c^2 v / (a (c^2 - v^2)),
       p'   = c^2 rho',
    the differential form of the stationary balance; the algebraic
    invariants (constant a rho v and energy flux) are not substituted in.
    """
    g = model.gamma
    rho0, v0, p0 = model.primitives(u)

    def rhs(a, y):
        rho, v, p = y
        if rho <= 0.0 or p <= 0.0:
            raise SonicTransitionError("stationary profile reached vacuum")
        c2 = g * p / rho
        denom = c2 - v * v
        if denom <= 0.0:
            raise SonicTransitionError(
                "stationary profile crossed the sonic point at area %g" % a)
        drho = rho * v * v / (a * denom)
        dv = -c2 * v / (a * denom)
        dp = c2 * drho
        return np.array([drho, dv, dp])

    h = (a1 - a0) / steps
    y = np.array([rho0, v0, p0])
    samples = [(a0, model.primitive_to_state(*y))]
    a = a0
    for _ in range(steps):
        k1 = rhs(a, y)
        k2 = rhs(a + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(a + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(a + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        a += h
        if return_samples:
            samples.append((a, model.primitive_to_state(*y)))
    if return_samples:
        return samples
    return model.primitive_to_state(*y)
