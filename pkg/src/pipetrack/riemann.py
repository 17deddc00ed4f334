"""Classical and junction Riemann solvers.

The classical solver joins two states by one wave per characteristic
family (Newton on the wave sizes).  The junction solver inserts the
geometry-jump transfer between the slow families (left of the standing
wave) and the fast families (right of it): with i0 slow families the
unknown sizes solve

    u_right = H_n(s_n) ... H_{i0+1}(s_{i0+1}) T H_{i0}(s_{i0}) ... H_1(s_1) u_left

where T is the junction transfer map.  Rarefactions are returned as
whole waves here; `discretize_rarefaction` splits them for tracking.
"""
import math

import numpy as np

from . import _kernels
from .coupling import junction_map
from .errors import InternalConsistencyError, LargeDataError
from .models import IsentropicModel

_K = _kernels.impl

KIND_SHOCK = "shock-or-contact"
KIND_RAREFACTION = "rarefaction-wavelet"
KIND_NONPHYSICAL = "non-physical"
KIND_ZERO = "zero-wave"


class Wave:
    """One wave of a Riemann solution: family, signed size, kind, the
    states on its two sides, and its speed (an interval for fans)."""

    __slots__ = ("family", "size", "kind", "left_state", "right_state",
                 "speed_lo", "speed_hi")

    def __init__(self, family, size, kind, left_state, right_state,
                 speed_lo, speed_hi):
        self.family = family
        self.size = size
        self.kind = kind
        self.left_state = left_state
        self.right_state = right_state
        self.speed_lo = speed_lo
        self.speed_hi = speed_hi

    @property
    def speed(self):
        return 0.5 * (self.speed_lo + self.speed_hi)

    def __repr__(self):
        return ("Wave(family=%s, size=%.3e, kind=%s, speeds=[%.4f, %.4f])"
                % (self.family, self.size, self.kind, self.speed_lo,
                   self.speed_hi))


class WaveDecomposition:
    """Solution of a (possibly junction) Riemann problem."""

    def __init__(self, model, left_state, right_state, sizes, waves,
                 junction=False, transfer_pair=None, zero_wave_size=0.0,
                 residual=0.0, junction_defect=0.0):
        self.model = model
        self.left_state = left_state
        self.right_state = right_state
        self.sizes = sizes
        self.waves = waves
        self.junction = junction
        self.transfer_pair = transfer_pair
        self.zero_wave_size = zero_wave_size
        self.residual = residual
        self.junction_defect = junction_defect

    def middle_states(self):
        states = [self.left_state]
        for w in self.waves:
            states.append(w.right_state)
        return states

    def state_at(self, xi):
        """Self-similar evaluation at slope xi = x/t (left-continuous).

        Inside a rarefaction fan the state follows the wave curve; the
        unit-rate parametrization makes the curve parameter equal to
        xi minus the fan's left edge.  For junction problems the
        standing jump at slope zero separates the slow and fast waves.
        """
        if self.junction:
            w_lo, w_hi = self.transfer_pair
            if xi <= 0.0:
                waves = [w for w in self.waves if w.speed_hi <= 0.0]
                state, fallback = self.left_state, w_lo
            else:
                waves = [w for w in self.waves if w.speed_lo > 0.0]
                state, fallback = w_hi, self.right_state
        else:
            waves = self.waves
            state = self.left_state
            fallback = self.right_state
        for w in waves:
            if xi <= w.speed_lo:
                return state
            if w.kind == KIND_RAREFACTION and xi < w.speed_hi:
                return self.model.lax_state(w.family, xi - w.speed_lo,
                                            w.left_state)
            state = w.right_state
        return state if waves else fallback


def discretize_rarefaction(sigma, delta_r):
    """Split a rarefaction of size sigma > 0 into m = floor(sigma/delta_r)+1
    equal wavelets; the sizes sum to sigma exactly."""
    if sigma <= 0.0:
        raise ValueError("rarefaction size must be positive")
    if delta_r <= 0.0:
        raise ValueError("wavelet step must be positive")
    m = int(math.floor(sigma / delta_r)) + 1
    return [sigma / m] * m


def _newton_sizes(residual_fn, n, tol, max_iter, fd_step):
    """Damped Newton with forward-difference Jacobian on wave sizes."""
    sizes = np.zeros(n)
    res = residual_fn(sizes)
    norm = float(np.linalg.norm(res))
    for _ in range(max_iter):
        if norm <= tol:
            return sizes, norm
        jac = np.empty((len(res), n))
        for j in range(n):
            probe = sizes.copy()
            probe[j] += fd_step
            jac[:, j] = (residual_fn(probe) - res) / fd_step
        try:
            d = np.linalg.solve(jac, res)
        except np.linalg.LinAlgError as exc:
            raise LargeDataError("wave-size Jacobian singular") from exc
        step = 1.0
        while step > 2.0 ** -16:
            trial = sizes - step * d
            try:
                r_new = residual_fn(trial)
            except (ValueError, FloatingPointError):
                step *= 0.5
                continue
            n_new = float(np.linalg.norm(r_new))
            if n_new < norm:
                sizes, res, norm = trial, r_new, n_new
                break
            step *= 0.5
        else:
            raise LargeDataError("wave-size iteration stalled at residual %g"
                                 % norm)
    if norm <= tol:
        return sizes, norm
    raise LargeDataError("wave-size iteration failed to converge "
                         "(residual %g)" % norm)


def _build_waves(model, u_left, sizes, families=None):
    """Chain of waves through the given sizes starting at u_left."""
    families = families if families is not None else range(1, model.n + 1)
    waves = []
    state = u_left
    for fam, sigma in zip(families, sizes):
        if sigma == 0.0:
            continue
        nxt = model.lax_state(fam, sigma, state)
        if not model.is_genuinely_nonlinear(fam):
            lam = model.front_speed(KIND_SHOCK, fam, state, nxt, sigma)
            waves.append(Wave(fam, sigma, KIND_SHOCK, state, nxt, lam, lam))
        elif sigma > 0.0:
            lo = float(model.eigenvalues(state)[fam - 1])
            hi = float(model.eigenvalues(nxt)[fam - 1])
            waves.append(Wave(fam, sigma, KIND_RAREFACTION, state, nxt,
                              lo, hi))
        else:
            s = model.shock_speed(state, nxt, fam)
            waves.append(Wave(fam, sigma, KIND_SHOCK, state, nxt, s, s))
        state = nxt
    return waves, state


def solve_riemann(model, u_left, u_right, tol=1e-13, max_iter=50,
                  fd_step=1e-7):
    """Classical Riemann solution joining u_left to u_right."""
    u_left = np.asarray(u_left, dtype=float)
    u_right = np.asarray(u_right, dtype=float)

    if isinstance(model, IsentropicModel) and model._gamma_fast:
        try:
            s1, s2, _ = _K.riemann_sizes(
                u_left[0], u_left[1], u_right[0], u_right[1],
                model.pressure.kappa, model.pressure.gamma, tol, max_iter,
                fd_step)
        except ValueError as exc:
            raise LargeDataError(str(exc)) from exc
        sizes = np.array([s1, s2])
    else:
        def residual(sizes):
            state = u_left
            for fam in range(1, model.n + 1):
                state = model.lax_state(fam, sizes[fam - 1], state)
            return state - u_right

        sizes, _ = _newton_sizes(residual, model.n, tol, max_iter, fd_step)

    waves, end = _build_waves(model, u_left, sizes)
    residual_norm = float(np.linalg.norm(end - u_right))
    return WaveDecomposition(model, u_left, u_right, sizes, waves,
                             residual=residual_norm)


def solve_generalized_riemann(model, cond, z_plus, z_minus, u_left, u_right,
                              tol=1e-13, max_iter=50, fd_step=1e-7,
                              check_signs=True):
    """Junction Riemann solution: slow waves, the geometry-jump transfer,
    then fast waves.  The standing wave's strength is the norm of the
    geometry jump."""
    u_left = np.asarray(u_left, dtype=float)
    u_right = np.asarray(u_right, dtype=float)
    zp = np.asarray(z_plus, dtype=float).reshape(-1)
    zm = np.asarray(z_minus, dtype=float).reshape(-1)
    i0 = model.subsonic_families_left
    zero_size = float(np.linalg.norm(zp - zm))

    fast = None
    if isinstance(model, IsentropicModel) and model._gamma_fast:
        fast = cond.kernel_args(zp, zm)
    if fast is not None:
        code, p1, p2 = fast
        try:
            s1, s2, _ = _K.generalized_sizes(
                u_left[0], u_left[1], u_right[0], u_right[1], code, p1, p2,
                model.pressure.kappa, model.pressure.gamma,
                getattr(cond, "profile_steps", 64), tol, max_iter, fd_step)
        except ValueError as exc:
            raise LargeDataError(str(exc)) from exc
        sizes = np.array([s1, s2])
    else:
        def residual(sizes):
            state = u_left
            for fam in range(1, i0 + 1):
                state = model.lax_state(fam, sizes[fam - 1], state)
            state = junction_map(model, cond, zp, zm, state)
            for fam in range(i0 + 1, model.n + 1):
                state = model.lax_state(fam, sizes[fam - 1], state)
            return state - u_right

        sizes, _ = _newton_sizes(residual, model.n, tol, max_iter, fd_step)

    left_waves, w_lo = _build_waves(model, u_left, sizes[:i0],
                                    families=range(1, i0 + 1))
    w_hi = junction_map(model, cond, zp, zm, w_lo)
    right_waves, end = _build_waves(model, w_hi, sizes[i0:],
                                    families=range(i0 + 1, model.n + 1))
    residual_norm = float(np.linalg.norm(end - u_right))
    defect = float(np.linalg.norm(
        model.flux(w_hi) - model.flux(w_lo) - cond.evaluate(zp, zm, w_lo)))

    if check_signs:
        bad = ([w for w in left_waves if w.speed_hi > 1e-9]
               + [w for w in right_waves if w.speed_lo < -1e-9])
        if bad:
            raise InternalConsistencyError(
                "junction wave on the wrong side of the standing wave: %r"
                % bad[0])

    waves = left_waves + right_waves
    return WaveDecomposition(model, u_left, u_right, sizes, waves,
                             junction=True, transfer_pair=(w_lo, w_hi),
                             zero_wave_size=zero_size,
                             residual=residual_norm, junction_defect=defect)
