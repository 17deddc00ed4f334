"""Scenario configuration: schema validation and construction of runnable
setups (model + coupling condition + geometry + initial datum + numerics).

A scenario is described by a plain JSON document with a ``schema_version``
field.  :func:`load_scenario` turns a document (or a path to one) into a
:class:`Scenario` whose :meth:`Scenario.build` method produces a ready
:class:`~pipetrack.engine.FrontTracker` for a given mesh width and wave
tolerance — the protocol expected by
:func:`pipetrack.verify.convergence_study`.

:func:`standard_suite` returns the eight named configurations exercised by
the regression and acceptance tests: two kinked pipes, one smoothly curved
pipe, one stepped-section pipe per coupling variant (``L``, ``p``, ``P``,
``S``), and one conservative-product case.
"""

import copy
import json
import numbers

import numpy as np

from .coupling import (
    junction_map,
    make_kink_condition,
    make_product_condition,
    make_section_condition,
    stationary_profile,
)
from .engine import FrontTracker
from .errors import ConfigError
from .geometry import (
    build_step_geometry,
    curved_pipe_geometry,
    kinked_pipe_geometry,
    linear_parameter_geometry,
    section_ramp_geometry,
    section_step_geometry,
)
from .models import GammaLaw, IsentropicModel

SCHEMA_VERSION = 1

_MODEL_KEYS = {"kind", "kappa", "gamma", "reference_state", "state_radius",
               "vacuum_floor"}
_CONDITION_KINDS = {"kink", "section", "product", "none"}
_GEOMETRY_KINDS = {"kinks", "curve", "section_steps", "section_ramp",
                   "linear_parameter", "none"}
_DATUM_KINDS = {"constant", "riemann", "steps", "stationary_section",
                "stationary"}
_SECTION_VARIANTS = {"L", "p", "P", "S"}


def _require(cond, message):
    if not cond:
        raise ConfigError(message)


def _as_state(value, label):
    _require(isinstance(value, (list, tuple)) and len(value) >= 1
             and all(isinstance(v, numbers.Real) for v in value),
             "%s must be a list of numbers" % label)
    return np.asarray(value, dtype=float)


def _positive(value, label):
    _require(isinstance(value, numbers.Real) and value > 0.0,
             "%s must be a positive number" % label)
    return float(value)


def load_config(path):
    """Read a scenario configuration document from a JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError("cannot read configuration %s: %s" % (path, exc))
    except ValueError as exc:
        raise ConfigError("malformed JSON in %s: %s" % (path, exc))
    _require(isinstance(cfg, dict), "configuration root must be an object")
    return cfg


def validate_config(cfg):
    """Check a configuration document and return a normalized copy.

    Raises :class:`~pipetrack.errors.ConfigError` with a human-readable
    message on the first problem found.
    """
    _require(isinstance(cfg, dict), "configuration root must be an object")
    _require(cfg.get("schema_version") == SCHEMA_VERSION,
             "schema_version must be %d" % SCHEMA_VERSION)
    out = copy.deepcopy(cfg)
    out.setdefault("name", "scenario")
    _require(isinstance(out["name"], str) and out["name"],
             "name must be a non-empty string")
    out.setdefault("seed", 0)
    _require(isinstance(out["seed"], numbers.Integral) and out["seed"] >= 0,
             "seed must be a non-negative integer")

    model = out.setdefault("model", {"kind": "isentropic"})
    _require(isinstance(model, dict), "model must be an object")
    _require(model.setdefault("kind", "isentropic") == "isentropic",
             "model.kind must be 'isentropic'")
    unknown = set(model) - _MODEL_KEYS
    _require(not unknown, "unknown model keys: %s" % sorted(unknown))
    if "kappa" in model:
        _positive(model["kappa"], "model.kappa")
    if "gamma" in model:
        _require(isinstance(model["gamma"], numbers.Real)
                 and model["gamma"] > 1.0, "model.gamma must exceed 1")
    if "reference_state" in model:
        _as_state(model["reference_state"], "model.reference_state")
    if "state_radius" in model:
        _positive(model["state_radius"], "model.state_radius")
    if "vacuum_floor" in model:
        _positive(model["vacuum_floor"], "model.vacuum_floor")

    cond = out.setdefault("condition", {"kind": "none"})
    _require(isinstance(cond, dict), "condition must be an object")
    kind = cond.setdefault("kind", "none")
    _require(kind in _CONDITION_KINDS,
             "condition.kind must be one of %s" % sorted(_CONDITION_KINDS))
    if kind == "kink":
        _positive(cond.setdefault("alpha", 0.5), "condition.alpha")
    elif kind == "section":
        _require(cond.get("variant") in _SECTION_VARIANTS,
                 "condition.variant must be one of %s"
                 % sorted(_SECTION_VARIANTS))
        if "profile_steps" in cond:
            _require(isinstance(cond["profile_steps"], numbers.Integral)
                     and cond["profile_steps"] >= 8,
                     "condition.profile_steps must be an integer >= 8")
    elif kind == "product":
        _require(isinstance(cond.setdefault("momentum_coefficient", 0.3),
                            numbers.Real),
                 "condition.momentum_coefficient must be a number")

    geom = out.setdefault("geometry", {"kind": "none"})
    _require(isinstance(geom, dict), "geometry must be an object")
    gk = geom.setdefault("kind", "none")
    _require(gk in _GEOMETRY_KINDS,
             "geometry.kind must be one of %s" % sorted(_GEOMETRY_KINDS))
    if gk == "kinks":
        kinks = geom.get("kinks")
        _require(isinstance(kinks, list) and kinks
                 and all(isinstance(k, (list, tuple)) and len(k) == 2
                         and all(isinstance(v, numbers.Real) for v in k)
                         for k in kinks),
                 "geometry.kinks must be a list of [position, angle] pairs")
    elif gk == "curve":
        segs = geom.get("segments")
        _require(isinstance(segs, list) and segs,
                 "geometry.segments must be a non-empty list")
        for seg in segs:
            _require(isinstance(seg, dict) and seg.get("kind") in
                     ("straight", "arc", "kink"),
                     "curve segments need kind straight | arc | kink")
            if seg["kind"] == "straight":
                _positive(seg.get("length", 0.0), "straight segment length")
            elif seg["kind"] == "arc":
                _positive(seg.get("radius", 0.0), "arc segment radius")
                _require(isinstance(seg.get("angle"), numbers.Real)
                         and seg["angle"] != 0.0,
                         "arc segment needs a nonzero angle")
            else:
                _require(isinstance(seg.get("angle"), numbers.Real),
                         "kink segment needs an angle")
    elif gk == "section_steps":
        _positive(geom.get("base_area", 0.0), "geometry.base_area")
        steps = geom.get("steps")
        _require(isinstance(steps, list) and steps
                 and all(isinstance(s, (list, tuple)) and len(s) == 2
                         for s in steps),
                 "geometry.steps must be a list of [position, area] pairs")
        for _, area in steps:
            _positive(area, "geometry step area")
    elif gk == "section_ramp":
        _positive(geom.get("area_from", 0.0), "geometry.area_from")
        _positive(geom.get("area_to", 0.0), "geometry.area_to")
        span = geom.get("span")
        _require(isinstance(span, (list, tuple)) and len(span) == 2
                 and span[0] < span[1],
                 "geometry.span must be [lo, hi] with lo < hi")
    elif gk == "linear_parameter":
        _require(isinstance(geom.get("base", 0.0), numbers.Real),
                 "geometry.base must be a number")
        _require(isinstance(geom.get("slope"), numbers.Real),
                 "geometry.slope must be a number")
        span = geom.get("span")
        _require(isinstance(span, (list, tuple)) and len(span) == 2
                 and span[0] < span[1],
                 "geometry.span must be [lo, hi] with lo < hi")

    if gk == "none":
        _require(kind == "none",
                 "a coupling condition requires a geometry")
    elif kind == "none":
        raise ConfigError("a geometry requires a coupling condition")

    datum = out.get("datum")
    _require(isinstance(datum, dict), "datum must be an object")
    dk = datum.get("kind")
    _require(dk in _DATUM_KINDS,
             "datum.kind must be one of %s" % sorted(_DATUM_KINDS))
    if dk == "constant":
        _as_state(datum.get("state"), "datum.state")
    elif dk == "riemann":
        _require(isinstance(datum.get("position", 0.0), numbers.Real),
                 "datum.position must be a number")
        _as_state(datum.get("left"), "datum.left")
        _as_state(datum.get("right"), "datum.right")
    elif dk == "steps":
        bks = datum.get("breakpoints")
        sts = datum.get("states")
        _require(isinstance(bks, list)
                 and all(isinstance(b, numbers.Real) for b in bks)
                 and list(bks) == sorted(bks),
                 "datum.breakpoints must be a sorted list of numbers")
        _require(isinstance(sts, list) and len(sts) == len(bks) + 1,
                 "datum.states must hold one more state than breakpoints")
        for s in sts:
            _as_state(s, "datum state")
    else:  # stationary_section / stationary
        _as_state(datum.get("upstream_state"), "datum.upstream_state")
        if dk == "stationary_section":
            _require(gk in ("section_steps", "section_ramp"),
                     "stationary_section datum needs a section geometry")
        else:
            _require(gk != "none",
                     "stationary datum needs a geometry and condition")
        if "perturbation" in datum:
            pert = datum["perturbation"]
            _require(isinstance(pert, dict), "datum.perturbation must be "
                     "an object with span and delta")
            span = pert.get("span")
            _require(isinstance(span, (list, tuple)) and len(span) == 2
                     and all(isinstance(v, numbers.Real) for v in span)
                     and span[0] < span[1],
                     "perturbation.span must be [lo, hi] with lo < hi")
            _as_state(pert.get("delta"), "perturbation.delta")
    if "jitter" in datum:
        _require(isinstance(datum["jitter"], numbers.Real)
                 and datum["jitter"] >= 0.0,
                 "datum.jitter must be a non-negative number")

    num = out.get("numerics")
    _require(isinstance(num, dict), "numerics must be an object")
    _positive(num.get("epsilon", 0.0), "numerics.epsilon")
    if "h" in num:
        _positive(num["h"], "numerics.h")
    if "h_list" in num:
        hs = num["h_list"]
        _require(isinstance(hs, list) and len(hs) >= 2
                 and all(isinstance(v, numbers.Real) and v > 0 for v in hs)
                 and all(b < a for a, b in zip(hs, hs[1:])),
                 "numerics.h_list must be a strictly decreasing list")
    _require("h" in num or "h_list" in num
             or gk == "none",
             "numerics needs h (or h_list) when a geometry is present")
    _positive(num.get("horizon", 0.0), "numerics.horizon")
    snaps = num.setdefault("snapshots", 11)
    if isinstance(snaps, numbers.Integral):
        _require(snaps >= 2, "numerics.snapshots count must be >= 2")
    else:
        _require(isinstance(snaps, list) and snaps
                 and all(isinstance(v, numbers.Real) for v in snaps)
                 and list(snaps) == sorted(snaps),
                 "numerics.snapshots must be a count or a sorted list")
    if "epsilon_rule" in num:
        _require(num["epsilon_rule"] in ("h2", "fixed"),
                 "numerics.epsilon_rule must be 'h2' or 'fixed'")
    if "max_interactions" in num:
        _require(isinstance(num["max_interactions"], numbers.Integral)
                 and num["max_interactions"] > 0,
                 "numerics.max_interactions must be a positive integer")
    if "variation_budget" in num:
        _positive(num["variation_budget"], "numerics.variation_budget")
    if "rho_threshold" in num:
        _require(isinstance(num["rho_threshold"], numbers.Real)
                 and num["rho_threshold"] >= 0.0,
                 "numerics.rho_threshold must be a non-negative number")
    if "window" in num:
        win = num["window"]
        _require(isinstance(win, (list, tuple)) and len(win) == 2
                 and all(isinstance(v, numbers.Real) for v in win)
                 and win[0] < win[1],
                 "numerics.window must be [lo, hi] with lo < hi")

    study = out.get("study")
    if study is not None:
        _require(isinstance(study, dict), "study must be an object")
        if "ratio_bound" in study:
            _positive(study["ratio_bound"], "study.ratio_bound")
        if "compare_window" in study:
            win = study["compare_window"]
            _require(isinstance(win, (list, tuple)) and len(win) == 2
                     and all(isinstance(v, numbers.Real) for v in win)
                     and win[0] < win[1],
                     "study.compare_window must be [lo, hi] with lo < hi")

    oracle = out.get("oracle")
    if oracle is not None:
        _require(isinstance(oracle, dict), "oracle must be an object")
        cells = oracle.setdefault("cells", 2000)
        _require(isinstance(cells, numbers.Integral) and cells >= 4,
                 "oracle.cells must be an integer >= 4")
        cfl = oracle.setdefault("cfl", 0.45)
        _require(isinstance(cfl, numbers.Real) and 0.0 < cfl <= 0.45,
                 "oracle.cfl must lie in (0, 0.45]")
    return out


def validate_riemann_config(cfg):
    """Validation for the single-Riemann-problem document: model and
    optional condition blocks plus a ``riemann`` section with the two
    states and, for junction problems, the two geometry values."""
    _require(isinstance(cfg, dict), "configuration root must be an object")
    _require(cfg.get("schema_version") == SCHEMA_VERSION,
             "schema_version must be %d" % SCHEMA_VERSION)
    out = copy.deepcopy(cfg)
    out.setdefault("model", {"kind": "isentropic"})
    out.setdefault("condition", {"kind": "none"})
    probe = {"schema_version": SCHEMA_VERSION,
             "model": out["model"],
             "condition": out["condition"],
             "geometry": ({"kind": "none"}
                          if out["condition"].get("kind", "none") == "none"
                          else {"kind": "kinks", "kinks": [[0.0, 0.1]]}),
             "datum": {"kind": "constant", "state": [1.0, 0.2]},
             "numerics": {"epsilon": 1e-2, "h": 0.1, "horizon": 0.1}}
    validated = validate_config(probe)
    out["model"] = validated["model"]
    out["condition"] = validated["condition"]
    rie = out.get("riemann")
    _require(isinstance(rie, dict), "riemann must be an object")
    left = _as_state(rie.get("left"), "riemann.left")
    right = _as_state(rie.get("right"), "riemann.right")
    _require(len(left) == len(right),
             "riemann.left and riemann.right must have equal length")
    has_zm = "z_minus" in rie
    has_zp = "z_plus" in rie
    _require(has_zm == has_zp,
             "riemann.z_minus and riemann.z_plus must come together")
    if has_zm:
        _as_state(rie["z_minus"], "riemann.z_minus")
        _as_state(rie["z_plus"], "riemann.z_plus")
        _require(out["condition"].get("kind", "none") != "none",
                 "a junction Riemann problem needs a condition")
    return out


def build_model(spec):
    pressure = None
    if "kappa" in spec or "gamma" in spec:
        pressure = GammaLaw(kappa=spec.get("kappa", 1.0),
                            gamma=spec.get("gamma", 2.0))
    kwargs = {}
    for key in ("reference_state", "state_radius", "vacuum_floor"):
        if key in spec:
            kwargs[key] = spec[key]
    return IsentropicModel(pressure=pressure, **kwargs)


def build_condition(spec, model):
    kind = spec.get("kind", "none")
    if kind == "none":
        return None
    if kind == "kink":
        return make_kink_condition(alpha=spec.get("alpha", 0.5))
    if kind == "section":
        return make_section_condition(
            spec["variant"], pressure=model.pressure,
            profile_steps=spec.get("profile_steps", 64))
    coeff = float(spec.get("momentum_coefficient", 0.3))
    return make_product_condition(
        lambda z, u: np.array([0.0, coeff * float(z[0])]),
        potential_gradient=lambda z, u: np.array([[0.0], [coeff]]))


def build_limit_geometry(spec):
    kind = spec.get("kind", "none")
    if kind == "none":
        return None
    if kind == "kinks":
        return kinked_pipe_geometry([tuple(k) for k in spec["kinks"]])
    if kind == "curve":
        return curved_pipe_geometry(spec["segments"],
                                    x_start=spec.get("x_start"))
    if kind == "section_steps":
        return section_step_geometry(spec["base_area"],
                                     [tuple(s) for s in spec["steps"]])
    if kind == "section_ramp":
        return section_ramp_geometry(spec["area_from"], spec["area_to"],
                                     tuple(spec["span"]))
    return linear_parameter_geometry(spec["base"], spec["slope"],
                                     tuple(spec["span"]),
                                     dim=spec.get("dim", 1))


def _insert_bump(breakpoints, states, lo, hi, delta):
    """Add ``delta`` to a stair profile on the interval [lo, hi].

    The bump endpoints become new breakpoints; existing breakpoints
    inside the interval keep their jump with the offset applied on both
    sides.
    """
    edges = sorted(set(breakpoints) | {lo, hi})
    out_bks, out_sts = [], []

    def base_state(x):
        k = sum(1 for b in breakpoints if b <= x)
        return states[k]

    out_sts.append(base_state(edges[0] - 1.0))
    for a, b in zip(edges, edges[1:] + [edges[-1] + 1.0]):
        mid = 0.5 * (a + b)
        s = base_state(mid)
        if lo <= a and mid <= hi:
            s = s + delta
        out_bks.append(a)
        out_sts.append(s)
    return out_bks, out_sts


def build_datum(spec, model, geometry=None, seed=0, condition=None):
    """Resolve a datum spec to ``(breakpoints, states)``.

    ``stationary_section`` data need the (already stepped) ``geometry``:
    each piece receives the steady-profile state for its cross-section, so
    the exact solution is a constant-in-time stack of standing junctions.
    ``stationary`` data generalize this to any coupling condition by
    chaining the junction transfer map across the geometry jumps.
    A positive ``jitter`` adds a seeded uniform perturbation to every state.
    """
    kind = spec["kind"]
    if kind == "constant":
        breakpoints = []
        states = [np.asarray(spec["state"], dtype=float)]
    elif kind == "riemann":
        breakpoints = [float(spec.get("position", 0.0))]
        states = [np.asarray(spec["left"], dtype=float),
                  np.asarray(spec["right"], dtype=float)]
    elif kind == "steps":
        breakpoints = [float(b) for b in spec["breakpoints"]]
        states = [np.asarray(s, dtype=float) for s in spec["states"]]
    elif kind == "stationary_section":
        if geometry is None:
            raise ConfigError(
                "stationary_section datum needs a section geometry")
        upstream = np.asarray(spec["upstream_state"], dtype=float)
        areas = [float(v[0]) for v in geometry.values]
        jumps = [x for x, lv, rv in geometry.jumps()]
        areas = [areas[0]] + [float(geometry.value_plus(x)[0])
                              for x in jumps]
        breakpoints = jumps
        states = [stationary_profile(model, areas[0], a, upstream)
                  for a in areas]
    else:  # stationary
        if geometry is None or condition is None:
            raise ConfigError(
                "stationary datum needs a geometry and condition")
        state = np.asarray(spec["upstream_state"], dtype=float)
        breakpoints, states = [], [state]
        for x, z_minus, z_plus in geometry.jumps():
            state = junction_map(model, condition, z_plus, z_minus, state)
            breakpoints.append(x)
            states.append(state)
    if kind in ("stationary_section", "stationary"):
        pert = spec.get("perturbation")
        if pert is not None:
            lo, hi = (float(pert["span"][0]), float(pert["span"][1]))
            delta = np.asarray(pert["delta"], dtype=float)
            breakpoints, states = _insert_bump(breakpoints, states,
                                               lo, hi, delta)
    jitter = float(spec.get("jitter", 0.0))
    if jitter > 0.0:
        rng = np.random.default_rng(seed)
        states = [s + jitter * rng.uniform(-1.0, 1.0, size=s.shape)
                  for s in states]
    return breakpoints, states


class Scenario:
    """A validated configuration plus its constructed model and condition.

    ``build(h, epsilon)`` returns a fresh tracker; both arguments default
    to the configured numerics, so the object doubles as the factory
    protocol used by convergence studies.
    """

    def __init__(self, config):
        self.config = validate_config(config)
        self.name = self.config["name"]
        self.seed = int(self.config["seed"])
        self.model = build_model(self.config["model"])
        self.condition = build_condition(self.config["condition"],
                                         self.model)
        self.geometry = build_limit_geometry(self.config["geometry"])
        self.numerics = self.config["numerics"]

    @property
    def epsilon(self):
        return float(self.numerics["epsilon"])

    @property
    def h(self):
        if "h" in self.numerics:
            return float(self.numerics["h"])
        if "h_list" in self.numerics:
            return float(self.numerics["h_list"][0])
        return None

    @property
    def h_list(self):
        if "h_list" in self.numerics:
            return [float(v) for v in self.numerics["h_list"]]
        if self.h is not None:
            return [self.h]
        return []

    @property
    def horizon(self):
        return float(self.numerics["horizon"])

    @property
    def snapshot_times(self):
        snaps = self.numerics["snapshots"]
        if isinstance(snaps, numbers.Integral):
            return np.linspace(0.0, self.horizon, int(snaps))
        return np.asarray(snaps, dtype=float)

    def epsilon_for(self, h):
        rule = self.numerics.get("epsilon_rule", "fixed")
        if rule == "h2" and h is not None:
            return float(h) ** 2
        return self.epsilon

    def window(self, h=None):
        """Spatial window for artifacts and distances: configured, or
        1/h around the geometry, or the datum span padded by the fastest
        signal."""
        if "window" in self.numerics:
            return tuple(float(v) for v in self.numerics["window"])
        if self.geometry is not None:
            hh = self.h if h is None else float(h)
            return (-1.0 / hh, 1.0 / hh)
        datum = self.config["datum"]
        if datum["kind"] == "riemann":
            span = [float(datum.get("position", 0.0))] * 2
        elif datum["kind"] == "steps":
            span = [float(datum["breakpoints"][0]),
                    float(datum["breakpoints"][-1])]
        else:
            span = [0.0, 0.0]
        pad = (1.2 * self.model.max_characteristic_speed() * self.horizon
               + 0.5)
        return (span[0] - pad, span[1] + pad)

    def reference_datum(self):
        """Callable ``x -> state`` for the smooth-geometry limit of the
        datum, suitable as the initial condition of a finite-volume
        reference run.  Piecewise data evaluate their configured states;
        ``stationary_section`` data follow the steady profile through the
        smooth limit geometry, with any perturbation applied on its span.
        """
        spec = self.config["datum"]
        kind = spec["kind"]
        if kind == "stationary_section":
            upstream = np.asarray(spec["upstream_state"], dtype=float)
            geometry = self.geometry
            lo = min([p.x_lo for p in geometry.pieces]
                     + [x for x, _ in geometry.atoms] or [0.0])
            a_ref = float(geometry.value(lo - 1.0)[0])
            pert = spec.get("perturbation")

            def sample(x):
                state = stationary_profile(
                    self.model, a_ref, float(geometry.value(x)[0]),
                    upstream)
                if pert is not None and (pert["span"][0] <= x
                                         <= pert["span"][1]):
                    state = state + np.asarray(pert["delta"], dtype=float)
                return state

            return sample
        if kind == "stationary":
            raise ConfigError(
                "no smooth reference is defined for the generic "
                "stationary datum; use stationary_section")
        breakpoints, states = build_datum(spec, self.model, seed=self.seed)

        def sample(x):
            k = sum(1 for b in breakpoints if b <= x)
            return states[k]

        return sample

    def stepped_geometry(self, h=None):
        if self.geometry is None:
            return None
        return build_step_geometry(self.geometry, self.h if h is None
                                   else float(h))

    def datum(self, h=None):
        stepped = self.stepped_geometry(h)
        return build_datum(self.config["datum"], self.model,
                           geometry=stepped, seed=self.seed,
                           condition=self.condition)

    def build(self, h=None, epsilon=None):
        stepped = self.stepped_geometry(h)
        datum = build_datum(self.config["datum"], self.model,
                            geometry=stepped, seed=self.seed,
                            condition=self.condition)
        eps = self.epsilon_for(h) if epsilon is None else float(epsilon)
        kwargs = {}
        if "max_interactions" in self.numerics:
            kwargs["max_interactions"] = int(
                self.numerics["max_interactions"])
        if "variation_budget" in self.numerics:
            kwargs["variation_budget"] = float(
                self.numerics["variation_budget"])
        if "rho_threshold" in self.numerics:
            kwargs["rho_threshold"] = float(self.numerics["rho_threshold"])
        return FrontTracker(self.model, datum, eps, geometry=stepped,
                            condition=self.condition, **kwargs)

    def run(self, log_events=True):
        tracker = self.build()
        trajectory = tracker.run(self.horizon,
                                 snapshot_times=self.snapshot_times,
                                 log_events=log_events)
        return tracker, trajectory


def load_scenario(source):
    """Build a :class:`Scenario` from a config dict or a JSON file path."""
    if isinstance(source, (str, bytes)):
        source = load_config(source)
    return Scenario(source)


def _base_config(name, **overrides):
    cfg = {
        "schema_version": SCHEMA_VERSION,
        "name": name,
        "seed": 0,
        "model": {"kind": "isentropic"},
        "numerics": {"epsilon": 1e-2, "h": 0.1, "horizon": 0.5,
                     "snapshots": 11, "epsilon_rule": "fixed"},
    }
    cfg.update(overrides)
    return cfg


def _bump_datum(x_lo, x_hi, base, bumped):
    return {"kind": "steps", "breakpoints": [x_lo, x_hi],
            "states": [base, bumped, base]}


_BASE = [1.0, 0.2]


def standard_suite():
    """The eight standard scenario configurations, keyed by name."""
    suite = {}

    suite["kink_pipe"] = _base_config(
        "kink_pipe",
        condition={"kind": "kink", "alpha": 0.5},
        geometry={"kind": "kinks", "kinks": [[0.0, 0.3]]},
        datum=_bump_datum(-0.8, -0.35, _BASE, [0.99, 0.235]),
    )

    suite["kink_polyline"] = _base_config(
        "kink_polyline",
        condition={"kind": "kink", "alpha": 0.5},
        geometry={"kind": "kinks",
                  "kinks": [[-0.5, 0.2], [0.0, -0.25], [0.45, 0.15]]},
        datum=_bump_datum(-1.0, -0.75, _BASE, [0.985, 0.225]),
    )

    suite["arc_pipe"] = _base_config(
        "arc_pipe",
        condition={"kind": "kink", "alpha": 0.5},
        geometry={"kind": "curve", "segments": [
            {"kind": "straight", "length": 1.2},
            {"kind": "arc", "radius": 1.0, "angle": 0.2},
            {"kind": "straight", "length": 1.2},
        ]},
        datum={"kind": "stationary", "upstream_state": _BASE,
               "perturbation": {"span": [-1.2, -0.9],
                                "delta": [-0.05, 0.04]}},
        study={"ratio_bound": 0.25},
    )
    suite["arc_pipe"]["numerics"].update(
        {"h": 0.2, "h_list": [0.2, 0.1, 0.05, 0.025],
         "epsilon_rule": "h2", "window": [-2.2, 1.6]})

    for variant in sorted(_SECTION_VARIANTS):
        name = "section_steps_%s" % variant
        suite[name] = _base_config(
            name,
            condition={"kind": "section", "variant": variant},
            geometry={"kind": "section_steps", "base_area": 1.0,
                      "steps": [[-0.4, 1.15], [0.3, 0.95]]},
            datum=_bump_datum(-1.0, -0.7, _BASE, [0.99, 0.23]),
        )

    suite["product_conservative"] = _base_config(
        "product_conservative",
        condition={"kind": "product", "momentum_coefficient": 0.3},
        geometry={"kind": "linear_parameter", "base": 0.0, "slope": 0.4,
                  "span": [-0.5, 0.5], "dim": 1},
        datum=_bump_datum(-1.2, -0.9, _BASE, [0.99, 0.23]),
    )

    return suite


def named_scenario(name):
    """Look up a named configuration: the standard suite plus extras.

    ``section_ramp_S`` is the smooth cross-section scenario used by the
    oracle-comparison study; ``stationary_section_S`` is the well-balanced
    steady-profile case whose exact solution never moves.
    """
    suite = standard_suite()
    if name in suite:
        return suite[name]
    if name == "section_ramp_S":
        cfg = _base_config(
            "section_ramp_S",
            condition={"kind": "section", "variant": "S"},
            geometry={"kind": "section_ramp", "area_from": 1.0,
                      "area_to": 1.5, "span": [-0.5, 0.5]},
            datum={"kind": "stationary_section", "upstream_state": _BASE,
                   "perturbation": {"span": [-1.2, -0.9],
                                    "delta": [-0.01, 0.008]}},
            study={"ratio_bound": 0.3, "compare_window": [-2.0, 0.8]},
        )
        cfg["numerics"].update({"h": 0.2,
                                "h_list": [0.2, 0.1, 0.05, 0.025],
                                "epsilon_rule": "h2",
                                "window": [-2.2, 1.6]})
        return cfg
    if name == "stationary_section_S":
        cfg = _base_config(
            "stationary_section_S",
            condition={"kind": "section", "variant": "S"},
            geometry={"kind": "section_ramp", "area_from": 1.0,
                      "area_to": 1.3, "span": [-0.5, 0.5]},
            datum={"kind": "stationary_section", "upstream_state": _BASE},
        )
        cfg["numerics"]["horizon"] = 1.0
        return cfg
    raise ConfigError("unknown scenario name %r" % (name,))
