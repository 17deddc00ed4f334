"""Event-driven wave-front tracking with standing junction waves.

The tracker evolves a piecewise-constant profile whose jumps travel as
fronts: shocks and rarefaction wavelets move at their mass-jump speed,
zero-waves encode the geometry jumps and stay put at the junctions, and
non-physical fronts carry interaction remainders at one fixed
supersonic speed.  Interactions are processed in time order from a lazy
heap over adjacent pairs; each resolution re-solves a (possibly
junction) Riemann problem or one of the simplified constructions, and
the wave-strength / interaction-potential functionals are recorded
after every event.
"""
import collections
import heapq
import math

import numpy as np

from .coupling import junction_map
from .errors import (
    ConfigError,
    InteractionCapError,
    InternalConsistencyError,
    VariationBudgetError,
)
from .riemann import (
    KIND_NONPHYSICAL,
    KIND_RAREFACTION,
    KIND_SHOCK,
    KIND_ZERO,
    discretize_rarefaction,
    solve_generalized_riemann,
    solve_riemann,
)

GlimmFunctionals = collections.namedtuple("GlimmFunctionals",
                                          ["V", "Q", "Upsilon", "C"])

_DROP_TOL = 1e-14
_NONPHYSICAL_FLOOR = 1e-15


def _hash01(fid):
    """Deterministic hash of a front id into [0, 1)."""
    return ((fid * 2654435761) & 0xFFFFFFFF) / 4294967296.0


class Front:
    """One tracked discontinuity."""

    __slots__ = ("fid", "kind", "family", "x_ref", "t_ref", "speed",
                 "u_left", "u_right", "size", "z_left", "z_right", "born",
                 "qcl")

    def __init__(self, fid, kind, family, x, t, speed, u_left, u_right,
                 size, z_left=None, z_right=None):
        self.fid = fid
        self.kind = kind
        self.family = family
        self.x_ref = x
        self.t_ref = t
        self.speed = speed
        self.u_left = u_left
        self.u_right = u_right
        self.size = size
        self.z_left = z_left
        self.z_right = z_right
        self.born = t
        self.qcl = -1

    def position(self, t):
        return self.x_ref + self.speed * (t - self.t_ref)

    def __repr__(self):
        return ("Front(fid=%d, %s, family=%s, size=%.3e, speed=%.4f)"
                % (self.fid, self.kind, self.family, self.size, self.speed))


def _qclass(kind, family, size, n):
    """Strength class used by the interaction potential: per family a
    shock class and a rarefaction class, then non-physical, then
    zero-wave."""
    if kind == KIND_ZERO:
        return 2 * n + 1
    if kind == KIND_NONPHYSICAL:
        return 2 * n
    return 2 * (family - 1) + (0 if size < 0.0 else 1)


def _build_approach_table(n, i0):
    """approach[c_left][c_right] for the strength classes: a pair is
    approaching when the left front's family exceeds the right one's,
    when they share a genuinely nonlinear family and one is a shock,
    or when a front heads toward a standing junction wave."""
    m = 2 * n + 2
    np_cl, zw_cl = 2 * n, 2 * n + 1
    table = [[False] * m for _ in range(m)]
    for cl in range(m):
        for cr in range(m):
            if cl == np_cl:
                table[cl][cr] = cr != np_cl
            elif cr == np_cl:
                table[cl][cr] = False
            elif cl == zw_cl and cr == zw_cl:
                table[cl][cr] = False
            elif cl == zw_cl:
                table[cl][cr] = (cr // 2 + 1) <= i0
            elif cr == zw_cl:
                table[cl][cr] = (cl // 2 + 1) > i0
            else:
                fl, fr = cl // 2 + 1, cr // 2 + 1
                if fl > fr:
                    table[cl][cr] = True
                elif fl == fr:
                    table[cl][cr] = (cl % 2 == 0) or (cr % 2 == 0)
    return table


class _OrderIndex:
    """Blocked view of the front chain with per-strength-class sums.

    The interaction potential changes at an event only through the fronts
    of the replaced cluster; the cross terms against the rest of the chain
    need the per-class strength sums strictly left and right of the
    cluster.  Keeping the chain chunked into ~sqrt(N) blocks with cached
    block sums makes that prefix query and every splice O(sqrt N), far
    below the cost of rescanning the chain at each of the many events.
    """

    __slots__ = ("n_classes", "target", "blocks", "sums", "of", "entry",
                 "tot")

    def __init__(self, n_classes):
        self.n_classes = n_classes
        self.target = 48
        self.blocks = [[]]
        self.sums = [[0.0] * n_classes]
        self.of = {}
        self.entry = {}
        self.tot = [0.0] * n_classes

    def build(self, items):
        """Rebuild from (fid, class, strength) rows in chain order."""
        items = list(items)
        n = len(items)
        self.target = max(48, int(1.5 * math.sqrt(n + 1.0)))
        self.blocks, self.sums = [], []
        self.of, self.entry = {}, {}
        self.tot = [0.0] * self.n_classes
        for start in range(0, n, self.target):
            chunk = items[start:start + self.target]
            blk = [row[0] for row in chunk]
            s = [0.0] * self.n_classes
            for fid, cls, v in chunk:
                self.entry[fid] = (cls, v)
                s[cls] += v
                self.tot[cls] += v
            for fid in blk:
                self.of[fid] = blk
            self.blocks.append(blk)
            self.sums.append(s)
        if not self.blocks:
            self.blocks = [[]]
            self.sums = [[0.0] * self.n_classes]

    def _pos(self, blk):
        for i, b in enumerate(self.blocks):
            if b is blk:
                return i
        raise InternalConsistencyError("order index lost a block")

    def left_sums(self, fid):
        """Per-class strength sums of all fronts strictly left of fid."""
        blk = self.of[fid]
        out = [0.0] * self.n_classes
        found = False
        for b, s in zip(self.blocks, self.sums):
            if b is blk:
                found = True
                break
            for c, val in enumerate(s):
                out[c] += val
        if not found:
            raise InternalConsistencyError("order index lost a block")
        for g in blk:
            if g == fid:
                return out
            cls, v = self.entry[g]
            out[cls] += v
        raise InternalConsistencyError("order index lost front %d" % fid)

    def remove(self, fid):
        blk = self.of.pop(fid)
        cls, v = self.entry.pop(fid)
        i = self._pos(blk)
        blk.remove(fid)
        self.sums[i][cls] -= v
        self.tot[cls] -= v
        if not blk and len(self.blocks) > 1:
            del self.blocks[i]
            del self.sums[i]

    def insert_after(self, after_fid, fid, cls, v):
        if after_fid is None:
            blk = self.blocks[0]
            blk.insert(0, fid)
        else:
            blk = self.of[after_fid]
            blk.insert(blk.index(after_fid) + 1, fid)
        self.of[fid] = blk
        self.entry[fid] = (cls, v)
        i = self._pos(blk)
        self.sums[i][cls] += v
        self.tot[cls] += v
        if len(blk) > 2 * self.target:
            half = len(blk) // 2
            right = blk[half:]
            del blk[half:]
            s_right = [0.0] * self.n_classes
            for g in right:
                c2, v2 = self.entry[g]
                s_right[c2] += v2
                self.of[g] = right
            self.sums[i] = [a - b for a, b in zip(self.sums[i], s_right)]
            self.blocks.insert(i + 1, right)
            self.sums.insert(i + 1, s_right)


def estimate_interaction_constant(model, samples=160, seed=20,
                                  size_range=(0.02, 0.08), spread=0.35,
                                  condition=None, z_pairs=()):
    """Empirical constant in the quadratic interaction estimates,
    measured on a presampling sweep: the worst of
    - the outgoing size change over the product of incoming strengths
      for random approaching wave pairs,
    - the relative growth of a transported state jump when re-based
      across a wave (per unit wave size), which controls non-physical
      front strengths, and
    - with a coupling condition and geometry jumps: the same two
      quantities across the junction transfer, per unit geometry jump.
    """
    rng = np.random.default_rng(seed)
    w0 = model.riemann_coordinates(model.reference_state)
    r = spread * model.state_radius
    n = model.n
    worst = 0.0

    def random_state():
        return model.state_from_riemann_coordinates(
            w0 + rng.uniform(-r, r, n))

    for _ in range(samples):
        u_l = random_state()
        crossing = n > 1 and rng.random() < 0.5
        if crossing:
            fam_left, fam_right = n, 1
            s1 = float(rng.uniform(*size_range) * rng.choice([-1.0, 1.0]))
            s2 = float(rng.uniform(*size_range) * rng.choice([-1.0, 1.0]))
        else:
            fam_left = fam_right = int(rng.integers(1, n + 1))
            s1 = -float(rng.uniform(*size_range))
            s2 = float(rng.uniform(*size_range) * rng.choice([-1.0, 1.0]))
        u_m = model.lax_state(fam_left, s1, u_l)
        u_r = model.lax_state(fam_right, s2, u_m)
        dec = solve_riemann(model, u_l, u_r)
        expected = np.zeros(n)
        expected[fam_left - 1] += s1
        expected[fam_right - 1] += s2
        change = float(np.sum(np.abs(dec.sizes - expected)))
        worst = max(worst, change / abs(s1 * s2))

    for _ in range(samples // 2):
        u_a = random_state()
        gap = rng.uniform(-1.0, 1.0, n)
        gap *= 1e-3 / np.linalg.norm(gap)
        u_b = u_a + gap
        fam = int(rng.integers(1, n + 1))
        s = float(rng.uniform(*size_range) * rng.choice([-1.0, 1.0]))
        moved = (model.lax_state(fam, s, u_b)
                 - model.lax_state(fam, s, u_a))
        growth = float(np.linalg.norm(moved)) / float(np.linalg.norm(gap))
        worst = max(worst, (growth - 1.0) / abs(s))

    for zm, zp in z_pairs:
        dz = float(np.linalg.norm(np.asarray(zp) - np.asarray(zm)))
        if dz == 0.0:
            continue
        for _ in range(max(10, samples // 4)):
            u_a = random_state()
            s = float(rng.uniform(*size_range) * rng.choice([-1.0, 1.0]))
            fam = n if rng.random() < 0.5 else 1
            if fam > model.subsonic_families_left:
                u_m = junction_map(model, condition, zp, zm, u_a)
                u_r = model.lax_state(fam, s, u_m)
                dec = solve_generalized_riemann(model, condition, zp, zm,
                                                u_a, u_r)
            else:
                u_m = model.lax_state(fam, s, u_a)
                u_r = junction_map(model, condition, zp, zm, u_m)
                dec = solve_generalized_riemann(model, condition, zp, zm,
                                                u_a, u_r)
            expected = np.zeros(n)
            expected[fam - 1] = s
            change = float(np.sum(np.abs(dec.sizes - expected)))
            worst = max(worst, change / (abs(s) * dz))

            gap = rng.uniform(-1.0, 1.0, n)
            gap *= 1e-3 / np.linalg.norm(gap)
            moved = (junction_map(model, condition, zp, zm, u_a + gap)
                     - junction_map(model, condition, zp, zm, u_a))
            growth = float(np.linalg.norm(moved)) / float(
                np.linalg.norm(gap))
            worst = max(worst, (growth - 1.0) / dz)
    return worst


class Trajectory:
    """Run artifacts: snapshots, the per-event log, the x-t segment log
    (one straight piece per front between interactions), and the
    functional series."""

    def __init__(self):
        self.snapshots = []
        self.events = []
        self.segments = []
        self.functionals = []

    def add_snapshot(self, t, positions, states):
        self.snapshots.append({"time": float(t), "positions": positions,
                               "states": states})

    def snapshot_at(self, t):
        for snap in self.snapshots:
            if abs(snap["time"] - t) <= 1e-12 * (1.0 + abs(t)):
                return snap
        raise ConfigError("no snapshot recorded at t=%g" % t)

    def sample(self, t, xs):
        snap = self.snapshot_at(t)
        return sample_profile(snap["positions"], snap["states"], xs)


def sample_profile(positions, states, xs):
    """Left-continuous evaluation of a piecewise-constant profile:
    states[i] lives on the interval ]positions[i-1], positions[i]]."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    idx = np.searchsorted(positions, xs, side="left")
    return np.asarray(states)[idx]


class FrontTracker:
    """Approximate evolution at accuracy parameter epsilon.

    `datum` is a pair (breakpoints, states) with one more state than
    breakpoints, each state constant on the left-closed cell ending at
    its breakpoint.  `geometry` is an optional piecewise-constant
    StepGeometry whose jumps become standing waves, coupled through
    `condition`.
    """

    def __init__(self, model, datum, epsilon, geometry=None, condition=None,
                 *, rho_threshold=None, delta_r=None, lambda_hat=None,
                 quadratic_constant=None, variation_budget=None,
                 jitter=0.0, max_interactions=1000000):
        if epsilon <= 0.0:
            raise ConfigError("epsilon must be positive")
        self.model = model
        self.geometry = geometry
        self.condition = condition
        self.epsilon = float(epsilon)
        self.delta_r = float(delta_r) if delta_r is not None else float(
            epsilon)
        self.rho_threshold = (float(rho_threshold)
                              if rho_threshold is not None
                              else float(epsilon) ** 2)
        self.lambda_hat = (float(lambda_hat) if lambda_hat is not None
                           else 1.2 * model.max_characteristic_speed())
        self.jitter = float(jitter)
        if not 0.0 <= self.jitter <= 1.0:
            raise ConfigError("jitter must lie in [0, 1]")
        self.max_interactions = int(max_interactions)
        if quadratic_constant is None:
            z_pairs = []
            if geometry is not None and condition is not None:
                jumps = sorted(geometry.jumps(),
                               key=lambda j: -np.linalg.norm(j[2] - j[1]))
                z_pairs = [(lo, hi) for _, lo, hi in jumps[:3]]
            quadratic_constant = max(
                1.0, 2.0 * estimate_interaction_constant(
                    model, condition=condition, z_pairs=z_pairs))
        self.quadratic_constant = float(quadratic_constant)

        table = _build_approach_table(model.n, model.subsonic_families_left)
        self._appr = table
        self._appr_into = [tuple(c for c in range(len(table))
                                 if table[c][cr])
                           for cr in range(len(table))]
        self._index = _OrderIndex(2 * model.n + 2)
        self._V_acc = 0.0
        self._Q_acc = 0.0
        self._TV_acc = 0.0

        self._fronts = {}
        self._next = {}
        self._prev = {}
        self._head = None
        self._fid = 0
        self._heap = []
        self._event_seq = 0
        self.time = 0.0
        self._valid_from = 0.0
        self.events_resolved = 0
        self._left_state = None
        self._segment_log = None

        self._initialize(datum, variation_budget)
        self._resync()
        self.functional_series = [(0.0,) + tuple(self.glimm_functionals()[:3])]
        self.tv_max = self._TV_acc

    # -- construction -------------------------------------------------------

    def _initialize(self, datum, variation_budget):
        breakpoints, states = datum
        breakpoints = np.asarray(breakpoints, dtype=float).ravel()
        states = np.atleast_2d(np.asarray(states, dtype=float))
        if len(states) != len(breakpoints) + 1:
            raise ConfigError("datum needs one more state than breakpoints")
        if len(breakpoints) and np.any(np.diff(breakpoints) <= 0.0):
            raise ConfigError("datum breakpoints must increase strictly")

        geometry_jumps = {}
        if self.geometry is not None:
            for x, lo, hi in self.geometry.jumps():
                geometry_jumps[float(x)] = (np.asarray(lo, dtype=float),
                                            np.asarray(hi, dtype=float))
        if geometry_jumps and self.condition is None:
            raise ConfigError(
                "geometry jumps require a junction coupling condition")

        if variation_budget is not None:
            tv_u = float(sum(np.linalg.norm(states[i + 1] - states[i])
                             for i in range(len(breakpoints))))
            tv_z = (self.geometry.total_variation()
                    if self.geometry is not None else 0.0)
            if tv_u + tv_z > variation_budget:
                raise VariationBudgetError(
                    "initial variation %.6g exceeds the small-variation "
                    "budget %.6g" % (tv_u + tv_z, variation_budget))

        positions = sorted(set(float(x) for x in breakpoints)
                           | set(geometry_jumps))
        self._left_state = states[0].copy()
        running = states[0].copy()
        prev_fid = None
        for p in positions:
            k = int(np.searchsorted(breakpoints, p, side="right"))
            target = states[k]
            if p in geometry_jumps:
                zm, zp = geometry_jumps[p]
                dec = solve_generalized_riemann(self.model, self.condition,
                                                zp, zm, running, target)
                specs = self._specs_from_decomposition(dec, zm, zp)
            else:
                dec = solve_riemann(self.model, running, target)
                specs = self._specs_from_decomposition(dec, None, None)
            fronts = self._materialize(specs, p, 0.0, running, None)
            if fronts:
                running = fronts[-1].u_right
            for f in fronts:
                self._fronts[f.fid] = f
                self._prev[f.fid] = prev_fid
                self._next[f.fid] = None
                if prev_fid is None:
                    self._head = f.fid
                else:
                    self._next[prev_fid] = f.fid
                prev_fid = f.fid

        fid = self._head
        while fid is not None:
            nxt = self._next[fid]
            if nxt is not None:
                self._push_pair(self._fronts[fid], self._fronts[nxt])
            fid = nxt

    def _specs_from_decomposition(self, dec, z_minus, z_plus):
        """Flatten a Riemann decomposition into front specs, splitting
        rarefactions into wavelets of size at most delta_r."""
        i0 = self.model.subsonic_families_left
        specs = []

        def expand(wave):
            if wave.kind == KIND_RAREFACTION and wave.size > self.delta_r:
                sizes = discretize_rarefaction(wave.size, self.delta_r)
                state, acc = wave.left_state, 0.0
                for j, s in enumerate(sizes):
                    acc += s
                    nxt = (wave.right_state if j == len(sizes) - 1 else
                           self.model.lax_state(wave.family, acc,
                                                wave.left_state))
                    specs.append([KIND_RAREFACTION, wave.family, s,
                                  nxt - state, None])
                    state = nxt
            else:
                specs.append([wave.kind, wave.family, wave.size,
                              wave.right_state - wave.left_state, None])

        for w in dec.waves:
            if dec.junction and w.family > i0:
                break
            expand(w)
        if dec.junction:
            w_lo, w_hi = dec.transfer_pair
            specs.append([KIND_ZERO, None, dec.zero_wave_size,
                          w_hi - w_lo, (z_minus, z_plus)])
            for w in dec.waves:
                if w.family > i0:
                    expand(w)
        return specs

    def _materialize(self, specs, x, t, u_anchor_left, u_anchor_right,
                     reuse_zero=None):
        """Turn front specs (kind, family, size, state jump, z pair) into
        chained Front objects anchored at the given left state; the exact
        right anchor, when given, is absorbed into the last front."""
        kept = []
        for kind, family, size, du, zpair in specs:
            if kind == KIND_ZERO:
                kept.append([kind, family, size, du, zpair])
            elif kind == KIND_NONPHYSICAL:
                if float(np.linalg.norm(du)) > _NONPHYSICAL_FLOOR:
                    kept.append([kind, family, size, du, zpair])
            elif (abs(size) > _DROP_TOL
                    and float(np.linalg.norm(du)) > _NONPHYSICAL_FLOOR):
                kept.append([kind, family, size, du, zpair])

        fronts = []
        running = np.asarray(u_anchor_left, dtype=float)
        for j, (kind, family, size, du, zpair) in enumerate(kept):
            u_l = running
            u_r = running + du
            if j == len(kept) - 1 and u_anchor_right is not None:
                u_r = np.asarray(u_anchor_right, dtype=float)
            running = u_r

            if kind == KIND_ZERO and reuse_zero is not None:
                f = reuse_zero
                f.u_left, f.u_right = u_l, u_r
                f.t_ref = t
            else:
                self._fid += 1
                z_l = zpair[0] if zpair else None
                z_r = zpair[1] if zpair else None
                f = Front(self._fid, kind, family, x, t, 0.0, u_l, u_r,
                          size, z_l, z_r)
            if kind == KIND_ZERO:
                f.speed = 0.0
            elif kind == KIND_NONPHYSICAL:
                f.speed = self.lambda_hat
                f.size = float(np.linalg.norm(u_r - u_l))
            else:
                f.speed = self.model.front_speed(kind, family, u_l, u_r,
                                                 size)
                if self.jitter > 0.0:
                    f.speed += (self.jitter * 0.1 * self.epsilon
                                * _hash01(f.fid))
            f.qcl = _qclass(f.kind, f.family, f.size, self.model.n)
            fronts.append(f)

        for fa, fb in zip(fronts, fronts[1:]):
            if fb.speed < fa.speed - 1e-9:
                raise InternalConsistencyError(
                    "outgoing fronts not speed-ordered: %r then %r"
                    % (fa, fb))
        return fronts

    # -- event queue --------------------------------------------------------

    def _collision(self, a, b):
        """(time, position) of the crossing of adjacent fronts a (left)
        and b (right), or None."""
        if a.kind == KIND_ZERO and b.kind == KIND_ZERO:
            return None
        if b.kind == KIND_ZERO:
            if a.speed <= 0.0:
                return None
            t = a.t_ref + (b.x_ref - a.x_ref) / a.speed
            return max(t, self.time), b.x_ref
        if a.kind == KIND_ZERO:
            if b.speed >= 0.0:
                return None
            t = b.t_ref + (a.x_ref - b.x_ref) / b.speed
            return max(t, self.time), a.x_ref
        ds = a.speed - b.speed
        if ds <= 1e-14 * (1.0 + abs(a.speed) + abs(b.speed)):
            return None
        xa0 = a.x_ref - a.speed * a.t_ref
        xb0 = b.x_ref - b.speed * b.t_ref
        t = (xb0 - xa0) / ds
        t = max(t, self.time)
        return t, xa0 + a.speed * t

    def _push_pair(self, a, b):
        hit = self._collision(a, b)
        if hit is None:
            return
        t, x = hit
        self._event_seq += 1
        heapq.heappush(self._heap, (t, x, self._event_seq, a.fid, b.fid))

    def _valid_event(self, fa, fb):
        return (fa in self._fronts and fb in self._fronts
                and self._next.get(fa) == fb)

    # -- interaction resolution ---------------------------------------------

    def _resolve(self, fa, fb, t, x):
        a = self._fronts[fa]
        b = self._fronts[fb]
        u_l, u_r = a.u_left, b.u_right
        if self._segment_log is not None:
            for g in (a, b):
                self._segment_log.append(self._segment(g, t))
        record = {
            "time": t,
            "position": x,
            "incoming": [{"kind": g.kind, "size": g.size} for g in (a, b)],
        }
        # Snapshot the incoming cluster and its side sums before any state
        # mutation: the functional update needs the pre-event values.
        old_items = self._cluster_items((a, b))
        side_left = self._index.left_sums(fa)
        side_right = list(self._index.tot)
        for c, val in enumerate(side_left):
            side_right[c] -= val
        for ci, vi, _ in old_items:
            side_right[ci] -= vi

        zero = a if a.kind == KIND_ZERO else b if b.kind == KIND_ZERO else None
        reuse = None
        if zero is not None:
            other = b if zero is a else a
            zm, zp = zero.z_left, zero.z_right
            reuse = zero
            if other.kind == KIND_NONPHYSICAL:
                if zero is a:
                    raise InternalConsistencyError(
                        "a non-physical front cannot reach a junction "
                        "from the right")
                u_t = junction_map(self.model, self.condition, zp, zm, u_l)
                specs = [
                    [KIND_ZERO, None, zero.size, u_t - u_l, (zm, zp)],
                    [KIND_NONPHYSICAL, None, 0.0, u_r - u_t, None],
                ]
            elif abs(other.size) * zero.size >= self.rho_threshold:
                dec = solve_generalized_riemann(self.model, self.condition,
                                                zp, zm, u_l, u_r)
                specs = self._specs_from_decomposition(dec, zm, zp)
            elif zero is b:
                # small physical front hits the junction from the left
                u_m = junction_map(self.model, self.condition, zp, zm, u_l)
                u_t = self.model.lax_state(other.family, other.size, u_m)
                specs = [
                    [KIND_ZERO, None, zero.size, u_m - u_l, (zm, zp)],
                    [other.kind, other.family, other.size, u_t - u_m, None],
                    [KIND_NONPHYSICAL, None, 0.0, u_r - u_t, None],
                ]
            else:
                # small physical front hits the junction from the right
                u_t = self.model.lax_state(other.family, other.size, u_l)
                u_m = junction_map(self.model, self.condition, zp, zm, u_t)
                specs = [
                    [other.kind, other.family, other.size, u_t - u_l, None],
                    [KIND_ZERO, None, zero.size, u_m - u_t, (zm, zp)],
                    [KIND_NONPHYSICAL, None, 0.0, u_r - u_m, None],
                ]
        elif a.kind == KIND_NONPHYSICAL:
            # non-physical fronts pass through without reflection
            u_m = self.model.lax_state(b.family, b.size, u_l)
            specs = [
                [b.kind, b.family, b.size, u_m - u_l, None],
                [KIND_NONPHYSICAL, None, 0.0, u_r - u_m, None],
            ]
        elif b.kind == KIND_NONPHYSICAL:
            raise InternalConsistencyError(
                "a physical front cannot catch a non-physical one")
        elif abs(a.size * b.size) >= self.rho_threshold:
            dec = solve_riemann(self.model, u_l, u_r)
            specs = self._specs_from_decomposition(dec, None, None)
        elif a.family == b.family:
            merged = a.size + b.size
            if abs(merged) > _DROP_TOL:
                kind = KIND_SHOCK if merged < 0.0 else KIND_RAREFACTION
                u_m = self.model.lax_state(a.family, merged, u_l)
                specs = [
                    [kind, a.family, merged, u_m - u_l, None],
                    [KIND_NONPHYSICAL, None, 0.0, u_r - u_m, None],
                ]
            else:
                specs = [[KIND_NONPHYSICAL, None, 0.0, u_r - u_l, None]]
        else:
            if a.family < b.family:
                raise InternalConsistencyError(
                    "crossing fronts out of family order")
            u_m1 = self.model.lax_state(b.family, b.size, u_l)
            u_m2 = self.model.lax_state(a.family, a.size, u_m1)
            specs = [
                [b.kind, b.family, b.size, u_m1 - u_l, None],
                [a.kind, a.family, a.size, u_m2 - u_m1, None],
                [KIND_NONPHYSICAL, None, 0.0, u_r - u_m2, None],
            ]

        fronts = self._materialize(specs, x, t, u_l, u_r, reuse_zero=reuse)
        self._replace(fa, fb, fronts)
        new_items = self._cluster_items(fronts)
        self._Q_acc += (self._local_q(new_items, side_left, side_right)
                        - self._local_q(old_items, side_left, side_right))
        self._V_acc += (sum(v for _, v, _ in new_items)
                        - sum(v for _, v, _ in old_items))
        self._TV_acc += (sum(w for _, _, w in new_items)
                         - sum(w for _, _, w in old_items))
        record["outgoing"] = [{"kind": g.kind, "size": g.size}
                              for g in fronts]
        return record

    def _replace(self, fa, fb, fronts):
        left_nb = self._prev[fa]
        right_nb = self._next[fb]
        self._index.remove(fa)
        self._index.remove(fb)
        prev = left_nb
        for f in fronts:
            self._index.insert_after(prev, f.fid, f.qcl, abs(f.size))
            prev = f.fid
        for fid in (fa, fb):
            f = self._fronts[fid]
            if f in fronts:
                continue
            del self._fronts[fid]
            del self._next[fid]
            del self._prev[fid]
        chain = ([left_nb] if left_nb is not None else []) \
            + [f.fid for f in fronts] \
            + ([right_nb] if right_nb is not None else [])
        for f in fronts:
            self._fronts[f.fid] = f
        for i, fid in enumerate(chain):
            if i + 1 < len(chain):
                self._next[fid] = chain[i + 1]
            elif fid == (fronts[-1].fid if fronts else left_nb):
                self._next[fid] = None
            if i > 0:
                self._prev[fid] = chain[i - 1]
        if fronts:
            if left_nb is None:
                self._head = fronts[0].fid
                self._prev[fronts[0].fid] = None
            if right_nb is None:
                self._next[fronts[-1].fid] = None
        else:
            if left_nb is None:
                self._head = right_nb
                if right_nb is not None:
                    self._prev[right_nb] = None
            if right_nb is None and left_nb is not None:
                self._next[left_nb] = None

        pairs = []
        if left_nb is not None and fronts:
            pairs.append((left_nb, fronts[0].fid))
        pairs.extend((fronts[i].fid, fronts[i + 1].fid)
                     for i in range(len(fronts) - 1))
        if right_nb is not None and fronts:
            pairs.append((fronts[-1].fid, right_nb))
        if not fronts and left_nb is not None and right_nb is not None:
            pairs.append((left_nb, right_nb))
        for pa, pb in pairs:
            self._push_pair(self._fronts[pa], self._fronts[pb])

    # -- state inspection ---------------------------------------------------

    def fronts_in_order(self):
        fid = self._head
        while fid is not None:
            yield self._fronts[fid]
            fid = self._next[fid]

    def glimm_functionals(self, exact=False):
        """Total wave strength V (zero-waves included), interaction
        potential Q over approaching pairs, and Upsilon = V + C*Q.

        Values are maintained incrementally across events; ``exact=True``
        forces a full rescan first.
        """
        if exact:
            self._resync()
        return GlimmFunctionals(self._V_acc, self._Q_acc,
                                self._V_acc
                                + self.quadratic_constant * self._Q_acc,
                                self.quadratic_constant)

    def _resync(self, check=False):
        """Recompute V, Q and TV from scratch (one ordered pass with
        per-class running sums) and rebuild the order index.  With
        ``check=True`` a drift of the incremental bookkeeping beyond
        float noise is treated as an internal bug."""
        into = self._appr_into
        run = [0.0] * (2 * self.model.n + 2)
        V = 0.0
        Q = 0.0
        TV = 0.0
        items = []
        for f in self.fronts_in_order():
            s = abs(f.size)
            gain = 0.0
            for c in into[f.qcl]:
                gain += run[c]
            Q += s * gain
            run[f.qcl] += s
            V += s
            TV += float(np.linalg.norm(f.u_right - f.u_left))
            items.append((f.fid, f.qcl, s))
        if check:
            scale = 1.0 + abs(V) + abs(Q) + abs(TV)
            drift = (abs(V - self._V_acc) + abs(Q - self._Q_acc)
                     + abs(TV - self._TV_acc))
            if drift > 1e-8 * scale:
                raise InternalConsistencyError(
                    "incremental functional bookkeeping drifted by %.3e "
                    "(V %.3e, Q %.3e, TV %.3e)"
                    % (drift, V - self._V_acc, Q - self._Q_acc,
                       TV - self._TV_acc))
        self._V_acc, self._Q_acc, self._TV_acc = V, Q, TV
        self._index.build(items)

    @staticmethod
    def _cluster_items(fronts):
        return [(f.qcl, abs(f.size),
                 float(np.linalg.norm(f.u_right - f.u_left)))
                for f in fronts]

    def _local_q(self, items, left_sums, right_sums):
        """Interaction-potential contribution of a cluster: pairs within
        the cluster plus cross terms against the per-class strength sums
        on each side."""
        table = self._appr
        m = self._index.n_classes
        q = 0.0
        for i, (ci, vi, _) in enumerate(items):
            row = table[ci]
            acc = 0.0
            for c in range(m):
                if table[c][ci]:
                    acc += left_sums[c]
                if row[c]:
                    acc += right_sums[c]
            for cj, vj, _ in items[i + 1:]:
                if row[cj]:
                    acc += vj
            q += vi * acc
        return q

    @staticmethod
    def _segment(front, t_end):
        """Straight x-t piece traced by a front from its last anchor to
        t_end; endpoints lie on the front's own line so the slope equals
        the stored speed."""
        return {
            "id": front.fid,
            "kind": front.kind,
            "family": front.family,
            "size": front.size,
            "speed": front.speed,
            "t0": front.t_ref,
            "x0": front.x_ref,
            "t1": t_end,
            "x1": front.position(t_end),
        }

    def profile(self, t):
        """Front positions and interval states at time t: states[i] is
        the value on ]positions[i-1], positions[i]]."""
        positions = []
        states = [self._left_state]
        for f in self.fronts_in_order():
            positions.append(f.position(t))
            states.append(f.u_right)
        if positions and any(positions[i + 1] < positions[i]
                             for i in range(len(positions) - 1)):
            raise InternalConsistencyError(
                "front ordering broke at t=%g" % t)
        return np.asarray(positions), np.asarray(states)

    def sample(self, t, xs):
        """Left-continuous profile values at positions xs, time t."""
        if t < self._valid_from - 1e-12 or t > self.time + 1e-12:
            raise ConfigError(
                "sample time %g outside the computed window [%g, %g]"
                % (t, self._valid_from, self.time))
        positions, states = self.profile(t)
        return sample_profile(positions, states, xs)

    def total_variation(self, exact=False):
        if exact:
            return float(sum(np.linalg.norm(f.u_right - f.u_left)
                             for f in self.fronts_in_order()))
        return self._TV_acc

    def nonphysical_strength(self):
        return float(sum(f.size for f in self.fronts_in_order()
                         if f.kind == KIND_NONPHYSICAL))

    def max_junction_defect(self):
        worst = 0.0
        for f in self.fronts_in_order():
            if f.kind != KIND_ZERO:
                continue
            defect = np.linalg.norm(
                self.model.flux(f.u_right) - self.model.flux(f.u_left)
                - self.condition.evaluate(f.z_right, f.z_left, f.u_left))
            worst = max(worst, float(defect))
        return worst

    def check_invariants(self, chain_tol=1e-11, trace_tol=1e-10):
        """Chained states, standing-wave trace condition, speed
        consistency: raises on violation."""
        prev = None
        for f in self.fronts_in_order():
            left = self._left_state if prev is None else prev.u_right
            if float(np.linalg.norm(f.u_left - left)) > chain_tol:
                raise InternalConsistencyError(
                    "state chain broken at %r" % f)
            if f.kind == KIND_ZERO and f.speed != 0.0:
                raise InternalConsistencyError("zero-wave moved: %r" % f)
            if f.kind == KIND_NONPHYSICAL and f.speed != self.lambda_hat:
                raise InternalConsistencyError(
                    "non-physical speed drifted: %r" % f)
            prev = f
        if self.max_junction_defect() > trace_tol:
            raise InternalConsistencyError("junction trace condition broken")

    # -- evolution ----------------------------------------------------------

    def _pop_event(self):
        """Next valid event; simultaneous events at one point are
        processed left-front-first."""
        while self._heap:
            t, x, seq, fa, fb = heapq.heappop(self._heap)
            if not self._valid_event(fa, fb):
                continue
            ties = []
            while self._heap:
                t2, x2, seq2, fa2, fb2 = self._heap[0]
                if (abs(t2 - t) > 1e-14 * (1.0 + abs(t))
                        or abs(x2 - x) > 1e-13 * (1.0 + abs(x))):
                    break
                heapq.heappop(self._heap)
                if self._valid_event(fa2, fb2):
                    ties.append((t2, x2, fa2, fb2))
            if ties:
                rank = {}
                for i, f in enumerate(self.fronts_in_order()):
                    rank[f.fid] = i
                ties.append((t, x, fa, fb))
                ties.sort(key=lambda e: rank[e[2]])
                t, x, fa, fb = ties[0]
                for te, xe, fae, fbe in ties[1:]:
                    self._event_seq += 1
                    heapq.heappush(self._heap,
                                   (te, xe, self._event_seq, fae, fbe))
            return t, x, fa, fb
        return None

    def run(self, horizon, snapshot_times=(), observers=(), log_events=True):
        if horizon <= self.time:
            raise ConfigError("horizon must exceed the current time")
        snaps = sorted(float(s) for s in snapshot_times)
        traj = Trajectory()
        self._segment_log = traj.segments if log_events else None
        si = 0
        while True:
            event = self._pop_event()
            if event is None:
                break
            t_ev, x_ev, fa, fb = event
            if t_ev > horizon:
                self._event_seq += 1
                heapq.heappush(self._heap,
                               (t_ev, x_ev, self._event_seq, fa, fb))
                break
            while si < len(snaps) and snaps[si] <= t_ev:
                if snaps[si] >= self.time:
                    traj.add_snapshot(snaps[si], *self.profile(snaps[si]))
                si += 1
            for obs in observers:
                hook = getattr(obs, "epoch", None)
                if hook is not None and t_ev > self.time:
                    hook(self.time, t_ev, self)
            self.events_resolved += 1
            if self.events_resolved > self.max_interactions:
                raise InteractionCapError(
                    "interaction cap %d exceeded at t=%.6g"
                    % (self.max_interactions, t_ev))
            record = self._resolve(fa, fb, t_ev, x_ev)
            self.time = t_ev
            self._valid_from = t_ev
            fun = self.glimm_functionals()
            if self._TV_acc > self.tv_max:
                self.tv_max = self._TV_acc
            record["V"], record["Q"], record["Upsilon"] = (fun.V, fun.Q,
                                                           fun.Upsilon)
            self.functional_series.append((t_ev, fun.V, fun.Q, fun.Upsilon))
            if self.events_resolved % 1024 == 0:
                self._resync(check=True)
            if log_events:
                traj.events.append(record)
            for obs in observers:
                hook = getattr(obs, "interaction", None)
                if hook is not None:
                    hook(record, self)
        while si < len(snaps) and snaps[si] <= horizon:
            if snaps[si] >= self.time:
                traj.add_snapshot(snaps[si], *self.profile(snaps[si]))
            si += 1
        for obs in observers:
            hook = getattr(obs, "epoch", None)
            if hook is not None and horizon > self.time:
                hook(self.time, horizon, self)
        self.time = horizon
        if self._segment_log is not None:
            for f in self.fronts_in_order():
                self._segment_log.append(self._segment(f, horizon))
            self._segment_log = None
        for obs in observers:
            hook = getattr(obs, "finish", None)
            if hook is not None:
                hook(horizon, self)
        traj.functionals = list(self.functional_series)
        return traj
