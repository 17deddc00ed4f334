"""Hyperbolic gas models: isentropic flow (density/momentum) and full
Euler flow (density/momentum/energy).

Both models expose the same interface: flux, characteristic speeds,
genuinely-nonlinear-normalized eigenvectors, Lax wave curves
parametrized so the characteristic speed grows at unit rate, and a
validated neighbourhood of a reference state expressed in
Riemann-invariant-like coordinates.  The gamma-law isentropic model
routes its curve evaluations through the scalar kernels in
``pipetrack._kernels`` (compiled when available).
"""
import math

import numpy as np

from . import _kernels

_K = _kernels.impl


class PressureLaw:
    """Smooth increasing pressure as a function of density."""

    def __call__(self, rho):
        raise NotImplementedError

    def derivative(self, rho):
        raise NotImplementedError

    def second_derivative(self, rho):
        raise NotImplementedError

    def validate(self, rho_min, rho_max, samples=200):
        """Check p' > 0 and p'' >= 0 on [rho_min, rho_max] by sampling."""
        grid = np.linspace(rho_min, rho_max, samples)
        for r in grid:
            if self.derivative(r) <= 0.0:
                raise ValueError("pressure law is not strictly increasing "
                                 "at rho=%g" % r)
            if self.second_derivative(r) < 0.0:
                raise ValueError("pressure law is not convex at rho=%g" % r)


class GammaLaw(PressureLaw):
    """p(rho) = kappa * rho**gamma with gamma > 1."""

    def __init__(self, kappa=1.0, gamma=2.0):
        if kappa <= 0.0 or gamma <= 1.0:
            raise ValueError("gamma-law needs kappa > 0 and gamma > 1")
        self.kappa = kappa
        self.gamma = gamma

    def __call__(self, rho):
        return self.kappa * rho ** self.gamma

    def derivative(self, rho):
        return self.kappa * self.gamma * rho ** (self.gamma - 1.0)

    def second_derivative(self, rho):
        g = self.gamma
        return self.kappa * g * (g - 1.0) * rho ** (g - 2.0)


class IsentropicModel:
    """The 2x2 system of gas dynamics in (rho, q) = (density, momentum):

        rho_t + q_x = 0
        q_t + (q**2/rho + p(rho))_x = 0

    Family 1 travels left, family 2 right relative to the gas; with the
    default reference state both characteristic speeds keep a fixed sign
    (subsonic regime), so every geometry jump sits between the families.
    """

    n = 2
    subsonic_families_left = 1  # families 1..1 travel slower than standing waves
    component_names = ("rho", "q")

    def __init__(self, pressure=None, reference_state=(1.0, 0.2),
                 state_radius=0.3, vacuum_floor=1e-6):
        self.pressure = pressure if pressure is not None else GammaLaw()
        self.reference_state = np.asarray(reference_state, dtype=float)
        self.state_radius = float(state_radius)
        self.vacuum_floor = float(vacuum_floor)
        self._gamma_fast = isinstance(self.pressure, GammaLaw)
        if self._gamma_fast:
            self._kappa = self.pressure.kappa
            self._gam = self.pressure.gamma
        rho0 = self.reference_state[0]
        self.pressure.validate(max(self.vacuum_floor, rho0 * 0.1), rho0 * 10.0)
        if not self.is_noncharacteristic(self.reference_state):
            raise ValueError("reference state is not subsonic")

    # -- basic quantities -------------------------------------------------

    def sound_speed(self, u):
        return math.sqrt(self.pressure.derivative(u[0]))

    def velocity(self, u):
        return u[1] / u[0]

    def flux(self, u):
        rho, q = u
        return np.array([q, q * q / rho + self.pressure(rho)])

    def flux_jacobian(self, u):
        rho, q = u
        v = q / rho
        return np.array([[0.0, 1.0],
                         [self.pressure.derivative(rho) - v * v, 2.0 * v]])

    def eigenvalues(self, u):
        c = self.sound_speed(u)
        v = self.velocity(u)
        return np.array([v - c, v + c])

    def eigenvector(self, u, family):
        """Right eigenvector of family 1 or 2, scaled so the directional
        derivative of its characteristic speed along it equals one."""
        lam = self.eigenvalues(u)[family - 1]
        raw = np.array([1.0, lam])
        eps = 1e-6
        lam_plus = self.eigenvalues(u + eps * raw)[family - 1]
        lam_minus = self.eigenvalues(u - eps * raw)[family - 1]
        scale = (lam_plus - lam_minus) / (2.0 * eps)
        if scale == 0.0:
            raise ValueError("family %d is not genuinely nonlinear at %s"
                             % (family, u))
        return raw / scale

    def is_genuinely_nonlinear(self, family):
        return True

    # -- validated neighbourhood ------------------------------------------

    def riemann_coordinates(self, u):
        """Coordinates in which the validated neighbourhood is a box:
        (v - phi(rho), v + phi(rho)) with phi' = c/rho."""
        rho, q = u
        v = q / rho
        phi = self._phi(rho)
        return np.array([v - phi, v + phi])

    def _phi(self, rho):
        if self._gamma_fast:
            c = _K.sound_speed(rho, self._kappa, self._gam)
            return 2.0 * c / (self._gam - 1.0)
        # generic pressure: integrate c(s)/s from the reference density
        rho0 = self.reference_state[0]
        grid, w = np.polynomial.legendre.leggauss(32)
        a, b = (rho0, rho) if rho >= rho0 else (rho, rho0)
        s = 0.5 * (b - a) * grid + 0.5 * (a + b)
        val = np.sum(w * np.sqrt([self.pressure.derivative(x) for x in s]) / s)
        val *= 0.5 * (b - a)
        return val if rho >= rho0 else -val

    def state_from_riemann_coordinates(self, w):
        """Inverse of riemann_coordinates (gamma-law closed form, bisection
        otherwise)."""
        v = 0.5 * (w[0] + w[1])
        phi = 0.5 * (w[1] - w[0])
        if self._gamma_fast:
            c = 0.5 * phi * (self._gam - 1.0)
            if c <= 0.0:
                raise ValueError("coordinates reach vacuum")
            rho = _K.rho_from_sound_speed(c, self._kappa, self._gam)
        else:
            lo, hi = self.vacuum_floor, self.reference_state[0]
            while self._phi(hi) < phi:
                hi *= 2.0
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if self._phi(mid) < phi:
                    lo = mid
                else:
                    hi = mid
            rho = 0.5 * (lo + hi)
        return np.array([rho, rho * v])

    def in_domain(self, u):
        if u[0] < self.vacuum_floor:
            return False
        w = self.riemann_coordinates(u)
        w0 = self.riemann_coordinates(self.reference_state)
        return bool(np.max(np.abs(w - w0)) <= self.state_radius)

    def max_characteristic_speed(self, margin=1.0):
        """Largest |characteristic speed| over the validated box (sampled
        on the box boundary in invariant coordinates)."""
        w0 = self.riemann_coordinates(self.reference_state)
        r = self.state_radius * margin
        best = 0.0
        grid = np.linspace(-r, r, 17)
        for edge in range(4):
            for t in grid:
                dw = np.array([t, r]) if edge == 0 else \
                     np.array([t, -r]) if edge == 1 else \
                     np.array([r, t]) if edge == 2 else np.array([-r, t])
                try:
                    u = self.state_from_riemann_coordinates(w0 + dw)
                except ValueError:
                    continue
                best = max(best, float(np.max(np.abs(self.eigenvalues(u)))))
        return best

    def is_noncharacteristic(self, u):
        """True when both characteristic speeds are bounded away from the
        standing-wave speed zero (subsonic state)."""
        lam = self.eigenvalues(u)
        return lam[0] < 0.0 < lam[1]

    # -- wave curves -------------------------------------------------------

    def lax_state(self, family, sigma, u):
        """State reached from u along the family's wave curve (rarefaction
        branch for sigma > 0, shock branch for sigma < 0)."""
        if self._gamma_fast:
            rho, q = _K.lax_state(family, sigma, u[0], u[1],
                                  self._kappa, self._gam)
            return np.array([rho, q])
        return self._lax_state_generic(family, sigma, u)

    def _lax_state_generic(self, family, sigma, u):
        if sigma == 0.0:
            return np.asarray(u, dtype=float).copy()
        if sigma > 0.0:
            # integrate the normalized eigenvector field
            steps = max(8, int(math.ceil(sigma / 0.005)))
            h = sigma / steps
            state = np.asarray(u, dtype=float).copy()
            for _ in range(steps):
                k1 = self.eigenvector(state, family)
                k2 = self.eigenvector(state + 0.5 * h * k1, family)
                k3 = self.eigenvector(state + 0.5 * h * k2, family)
                k4 = self.eigenvector(state + h * k3, family)
                state = state + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            return state
        return self._hugoniot_by_speed(family, sigma, u)

    def _hugoniot_by_speed(self, family, sigma, u):
        """Shock branch: Newton on density so the characteristic speed of
        the family changes by exactly sigma across the curve (the same
        parametrization the gamma-law kernels use)."""
        rho0, q0 = u
        v0 = q0 / rho0
        target = self.eigenvalues(u)[family - 1] + sigma
        sign = 1.0 if family == 1 else -1.0  # density rises on 1-shocks

        def state_at(rho):
            dp = self.pressure(rho) - self.pressure(rho0)
            drho = rho - rho0
            # both families lower the velocity along the shock branch
            v = v0 - math.sqrt(dp * drho / (rho * rho0))
            return np.array([rho, rho * v])

        rho = rho0 + sigma * self.eigenvector(u, family)[0]
        if (rho - rho0) * sign <= 0.0:
            rho = rho0 * (1.0 + sign * 1e-6)
        tol = 1e-14 * (1.0 + abs(target))
        for _ in range(80):
            st = state_at(rho)
            val = self.eigenvalues(st)[family - 1] - target
            if abs(val) <= tol:
                return st
            eps = 1e-8 * rho0
            der = (self.eigenvalues(state_at(rho + eps))[family - 1]
                   - self.eigenvalues(state_at(rho - eps))[family - 1]) \
                / (2.0 * eps)
            rho_new = rho - val / der
            if rho_new <= 0.0 or (rho_new - rho0) * sign < 0.0:
                rho_new = 0.5 * (rho + rho0)
            rho = rho_new
        raise ValueError("shock-branch iteration failed for family %d"
                         % family)

    def shock_speed(self, u_left, u_right, family=None):
        """Scalar speed s with f(ur) - f(ul) = s (ur - ul) in the
        least-squares sense; raises when no single speed fits."""
        du = np.asarray(u_right, float) - np.asarray(u_left, float)
        nrm2 = float(du @ du)
        if nrm2 < 1e-28:
            if family is None:
                raise ValueError("degenerate jump needs a family hint")
            return float(self.eigenvalues(u_left)[family - 1])
        df = self.flux(u_right) - self.flux(u_left)
        s = float(du @ df) / nrm2
        resid = float(np.linalg.norm(df - s * du))
        if resid > 1e-6 * max(1.0, math.sqrt(nrm2)):
            raise ValueError("states are not connected by a single jump "
                             "(defect %g)" % resid)
        return s

    def front_speed(self, kind, family, u_left, u_right, sigma):
        """Propagation speed assigned to a tracked front.

        Shocks and rarefaction pieces use the mass jump condition
        (exact for states on the Hugoniot branch; rarefaction curves
        satisfy dq/drho = lambda, so the secant lies inside the fan).
        The result is clamped into the characteristic bracket of the
        family, which is a no-op for admissible jumps but repairs the
        wild quotients produced by roundoff-sized jumps.  Degenerate
        jumps fall back to the characteristic speed.
        """
        lam_l = float(self.eigenvalues(u_left)[family - 1])
        lam_r = float(self.eigenvalues(u_right)[family - 1])
        lo, hi = (lam_l, lam_r) if lam_l <= lam_r else (lam_r, lam_l)
        drho = u_right[0] - u_left[0]
        if abs(drho) > 1e-14:
            return min(max((u_right[1] - u_left[1]) / drho, lo), hi)
        return 0.5 * (lam_l + lam_r)

    def max_wave_speed(self, states):
        return max(float(np.max(np.abs(self.eigenvalues(u))))
                   for u in states)

    def describe(self):
        if self._gamma_fast:
            return ("isentropic gas, p = %g rho^%g"
                    % (self._kappa, self._gam))
        return "isentropic gas, custom pressure law"


class EulerModel:
    """The 3x3 ideal-gas Euler system in (rho, m, E): density, momentum,
    total energy, with p = (gamma - 1) (E - m**2 / (2 rho)).

    Families 1 and 3 are genuinely nonlinear, family 2 is the linearly
    degenerate contact.  Used mainly for stationary junction profiles and
    junction Riemann problems.
    """

    n = 3
    subsonic_families_left = 1

    def __init__(self, gamma=1.4, c_v=1.0, reference_state=None,
                 state_radius=0.3, vacuum_floor=1e-6):
        if gamma <= 1.0:
            raise ValueError("Euler model needs gamma > 1")
        self.gamma = gamma
        self.c_v = c_v
        if reference_state is None:
            # rho = 1, v = 0.3, p = 1
            reference_state = self.primitive_to_state(1.0, 0.3, 1.0)
        self.reference_state = np.asarray(reference_state, dtype=float)
        self.state_radius = float(state_radius)
        self.vacuum_floor = float(vacuum_floor)
        if not self.is_noncharacteristic(self.reference_state):
            raise ValueError("reference state is not subsonic")

    # -- primitive/conserved conversions ----------------------------------

    def primitive_to_state(self, rho, v, p):
        return np.array([rho, rho * v,
                         p / (self.gamma - 1.0) + 0.5 * rho * v * v])

    def primitives(self, u):
        rho, m, E = u
        v = m / rho
        p = (self.gamma - 1.0) * (E - 0.5 * m * v)
        return rho, v, p

    def pressure_of(self, u):
        return self.primitives(u)[2]

    def sound_speed(self, u):
        rho, _, p = self.primitives(u)
        return math.sqrt(self.gamma * p / rho)

    def velocity(self, u):
        return u[1] / u[0]

    def entropy(self, u):
        rho, _, p = self.primitives(u)
        return self.c_v * math.log(p * rho ** (-self.gamma))

    def flux(self, u):
        rho, m, E = u
        v, p = m / rho, self.primitives(u)[2]
        return np.array([m, m * v + p, v * (E + p)])

    def flux_jacobian(self, u):
        rho, m, E = u
        g = self.gamma
        v = m / rho
        p = (g - 1.0) * (E - 0.5 * m * v)
        H = (E + p) / rho
        return np.array([
            [0.0, 1.0, 0.0],
            [0.5 * (g - 3.0) * v * v, (3.0 - g) * v, g - 1.0],
            [0.5 * (g - 1.0) * v ** 3 - v * H, H - (g - 1.0) * v * v, g * v],
        ])

    def eigenvalues(self, u):
        v = self.velocity(u)
        c = self.sound_speed(u)
        return np.array([v - c, v, v + c])

    def eigenvector(self, u, family):
        rho, m, E = u
        v = m / rho
        c = self.sound_speed(u)
        p = self.primitives(u)[2]
        H = (E + p) / rho
        if family == 1:
            raw = np.array([1.0, v - c, H - v * c])
        elif family == 2:
            raw = np.array([1.0, v, 0.5 * v * v])
            return raw / np.linalg.norm(raw)
        else:
            raw = np.array([1.0, v + c, H + v * c])
        eps = 1e-6
        lam_p = self.eigenvalues(u + eps * raw)[family - 1]
        lam_m = self.eigenvalues(u - eps * raw)[family - 1]
        scale = (lam_p - lam_m) / (2.0 * eps)
        return raw / scale

    def is_genuinely_nonlinear(self, family):
        return family != 2

    # -- validated neighbourhood ------------------------------------------

    def riemann_coordinates(self, u):
        rho, v, p = self.primitives(u)
        c = math.sqrt(self.gamma * p / rho)
        spread = 2.0 * c / (self.gamma - 1.0)
        return np.array([v - spread, self.entropy(u), v + spread])

    def state_from_riemann_coordinates(self, w):
        """Inverse of riemann_coordinates (ideal-gas closed form)."""
        v = 0.5 * (w[0] + w[2])
        spread = 0.5 * (w[2] - w[0])
        c = 0.5 * spread * (self.gamma - 1.0)
        if c <= 0.0:
            raise ValueError("coordinates reach vacuum")
        rho = (c * c * math.exp(-w[1] / self.c_v) / self.gamma) \
            ** (1.0 / (self.gamma - 1.0))
        p = rho * c * c / self.gamma
        return self.primitive_to_state(rho, v, p)

    def in_domain(self, u):
        if u[0] < self.vacuum_floor or self.pressure_of(u) <= 0.0:
            return False
        w = self.riemann_coordinates(u)
        w0 = self.riemann_coordinates(self.reference_state)
        return bool(np.max(np.abs(w - w0)) <= self.state_radius)

    def max_characteristic_speed(self, margin=1.0):
        w0 = self.riemann_coordinates(self.reference_state)
        r = self.state_radius * margin
        best = 0.0
        grid = np.linspace(-r, r, 9)
        for da in grid:
            for db in grid:
                for dc in (-r, 0.0, r):
                    try:
                        u = self.state_from_riemann_coordinates(
                            w0 + np.array([da, dc, db]))
                    except ValueError:
                        continue
                    best = max(best,
                               float(np.max(np.abs(self.eigenvalues(u)))))
        return best

    def is_noncharacteristic(self, u):
        lam = self.eigenvalues(u)
        return lam[0] < 0.0 < lam[1]

    # -- wave curves -------------------------------------------------------

    def lax_state(self, family, sigma, u):
        if sigma == 0.0:
            return np.asarray(u, dtype=float).copy()
        if family == 2:
            return np.asarray(u, float) + sigma * self.eigenvector(u, 2)
        rho0, v0, p0 = self.primitives(u)
        c0 = math.sqrt(self.gamma * p0 / rho0)
        g = self.gamma
        if sigma > 0.0:
            k1 = (g - 1.0) / (g + 1.0)
            c = c0 - k1 * sigma if family == 1 else c0 + k1 * sigma
            if c <= 0.0:
                raise ValueError("wave parameter %g reaches vacuum" % sigma)
            v = v0 + 2.0 * sigma / (g + 1.0)
            rho = rho0 * (c / c0) ** (2.0 / (g - 1.0))
            p = p0 * (rho / rho0) ** g
            return self.primitive_to_state(rho, v, p)
        return self._hugoniot_by_speed(family, sigma, u)

    def _hugoniot_by_speed(self, family, sigma, u):
        rho0, v0, p0 = self.primitives(u)
        g = self.gamma
        target = self.eigenvalues(u)[family - 1] + sigma
        sign = 1.0 if family == 1 else -1.0  # pressure rises on 1-shocks

        def state_at(p):
            beta = (g + 1.0) / (g - 1.0)
            rho = rho0 * (beta * p + p0) / (p + beta * p0)
            dp = p - p0
            drho = rho - rho0
            if dp == 0.0:
                return self.primitive_to_state(rho0, v0, p0)
            mflux = sign * math.sqrt(dp * rho * rho0 / drho)
            v = v0 - dp / mflux
            return self.primitive_to_state(rho, v, p)

        def lam_at(p):
            return self.eigenvalues(state_at(p))[family - 1]

        p = p0 * (1.0 + sign * 1e-3)
        for _ in range(80):
            val = lam_at(p) - target
            if abs(val) <= 1e-13:
                return state_at(p)
            eps = 1e-8 * p0
            der = (lam_at(p + eps) - lam_at(p)) / eps
            p_new = p - val / der
            if p_new <= 0.0 or (p_new - p0) * sign < 0.0:
                p_new = 0.5 * (p + p0) if (p - p0) * sign > 0 else 0.5 * p
            p = p_new
        raise ValueError("shock-branch iteration failed for family %d"
                         % family)

    def shock_speed(self, u_left, u_right, family=None):
        du = np.asarray(u_right, float) - np.asarray(u_left, float)
        nrm2 = float(du @ du)
        if nrm2 < 1e-28:
            if family is None:
                raise ValueError("degenerate jump needs a family hint")
            return float(self.eigenvalues(u_left)[family - 1])
        df = self.flux(u_right) - self.flux(u_left)
        s = float(du @ df) / nrm2
        resid = float(np.linalg.norm(df - s * du))
        if resid > 1e-6 * max(1.0, math.sqrt(nrm2)):
            raise ValueError("states are not connected by a single jump "
                             "(defect %g)" % resid)
        return s

    def front_speed(self, kind, family, u_left, u_right, sigma):
        lam_l = float(self.eigenvalues(u_left)[family - 1])
        lam_r = float(self.eigenvalues(u_right)[family - 1])
        lo, hi = (lam_l, lam_r) if lam_l <= lam_r else (lam_r, lam_l)
        drho = u_right[0] - u_left[0]
        if abs(drho) > 1e-14:
            return min(max((u_right[1] - u_left[1]) / drho, lo), hi)
        return 0.5 * (lam_l + lam_r)

    def max_wave_speed(self, states):
        return max(float(np.max(np.abs(self.eigenvalues(u))))
                   for u in states)

    def describe(self):
        return "ideal-gas Euler flow, gamma = %g" % self.gamma
