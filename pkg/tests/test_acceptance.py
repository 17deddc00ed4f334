"""Acceptance gate: one numbered test per shipped guarantee.

Each test asserts a single end-to-end property of the solver at its
published tolerance, so the verbose pytest report reads as a pass/fail
checklist.  Expensive ladder runs are shared through session fixtures;
every individual test finishes in seconds on a laptop.
"""

import numpy as np
import pytest

from pipetrack import scenarios, verify
from pipetrack.coupling import (
    junction_map,
    make_kink_condition,
    make_product_condition,
    make_section_condition,
    section_derivative_comparison,
    stationary_profile,
)
from pipetrack.models import EulerModel, IsentropicModel
from pipetrack.riemann import solve_generalized_riemann

MODEL = IsentropicModel()


def _unit(theta):
    return np.array([np.cos(theta), np.sin(theta)])


def _condition_pool():
    """One representative coupling of every kind, with a matched sampler
    for admissible geometry values."""
    return [
        ("kink", make_kink_condition(0.5),
         lambda rng: _unit(rng.uniform(-0.6, 0.6))),
        ("section_L", make_section_condition("L"),
         lambda rng: np.array([rng.uniform(0.7, 1.4)])),
        ("section_p", make_section_condition("p"),
         lambda rng: np.array([rng.uniform(0.7, 1.4)])),
        ("section_P", make_section_condition("P"),
         lambda rng: np.array([rng.uniform(0.7, 1.4)])),
        ("section_S", make_section_condition("S"),
         lambda rng: np.array([rng.uniform(0.7, 1.4)])),
        ("product", make_product_condition(
            lambda z, u: np.array([0.0, 0.3 * float(z[0])]),
            potential_gradient=lambda z, u: np.array([[0.0], [0.3]])),
         lambda rng: np.array([rng.uniform(-0.5, 0.5)])),
    ]


def _subsonic_state(rng, rho_range=(0.5, 2.0), mach_range=(-0.8, 0.8)):
    rho = rng.uniform(*rho_range)
    c = MODEL.sound_speed(np.array([rho, 0.0]))
    v = rng.uniform(*mach_range) * c
    return np.array([rho, rho * v])


def _stair_integral(positions, states, window, weight=None):
    """Integral of (weight * first component) of a stair profile."""
    lo, hi = window
    cuts = [lo] + [p for p in positions if lo < p < hi] + [hi]
    positions = list(positions)
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (a + b)
        k = sum(1 for p in positions if p <= mid)
        w = 1.0 if weight is None else weight(mid)
        total += w * states[k][0] * (b - a)
    return total


def _datum_variation(breakpoints, states):
    return float(sum(np.linalg.norm(b - a)
                     for a, b in zip(states, states[1:])))


# -- shared expensive runs ----------------------------------------------------

@pytest.fixture(scope="session")
def suite_runs():
    """The eight standard scenarios, each run once at its defaults."""
    runs = {}
    for name, cfg in scenarios.standard_suite().items():
        sc = scenarios.Scenario(cfg)
        tracker, trajectory = sc.run()
        runs[name] = (sc, tracker, trajectory)
    return runs


@pytest.fixture(scope="session")
def ramp_study():
    """Smooth cross-section ladder against the finite-volume reference:
    trackers with dense snapshots, plus the 2000-cell oracle."""
    sc = scenarios.Scenario(scenarios.named_scenario("section_ramp_S"))
    domain = sc.window()
    oracle = verify.fv_oracle(
        sc.model, sc.reference_datum(), window=domain, cells=2000,
        horizon=sc.horizon, source=verify.section_flow_source(sc.geometry))
    rungs = []
    for h in sc.h_list:
        tracker = sc.build(h)
        trajectory = tracker.run(
            sc.horizon, snapshot_times=np.linspace(0.0, sc.horizon, 101))
        rungs.append((h, sc.epsilon_for(h), tracker, trajectory))
    return {"scenario": sc, "oracle": oracle, "rungs": rungs}


@pytest.fixture(scope="session")
def arc_ladder():
    """Arc-pipe scenario over the halving mesh ladder."""
    sc = scenarios.Scenario(scenarios.standard_suite()["arc_pipe"])
    window = sc.window(sc.h_list[0])
    profiles = []
    trackers = []
    for h in sc.h_list:
        tracker = sc.build(h)
        tracker.run(sc.horizon, snapshot_times=[sc.horizon])
        profiles.append(tracker.profile(sc.horizon))
        trackers.append(tracker)
    return {"scenario": sc, "window": window, "profiles": profiles,
            "trackers": trackers}


# -- the acceptance criteria --------------------------------------------------

def test_01_junction_identity():
    """A vanishing geometry jump must transfer every subsonic state to
    itself: |T(z, z, u) - u| <= 1e-12 over 1000 random states."""
    rng = np.random.default_rng(101)
    pool = _condition_pool()
    worst = 0.0
    for i in range(1000):
        _, cond, draw_z = pool[i % len(pool)]
        u = _subsonic_state(rng)
        z = draw_z(rng)
        out = junction_map(MODEL, cond, z, z, u)
        worst = max(worst, float(np.linalg.norm(out - u)))
    print("junction identity worst defect: %.3e" % worst)
    assert worst <= 1e-12


def test_02_generalized_riemann_exactness():
    """200 random small-data junction problems: the reconstructed wave
    pattern matches the data and the flux defect matches the coupling,
    both within 1e-11."""
    rng = np.random.default_rng(202)
    pool = _condition_pool()
    worst_residual = 0.0
    worst_defect = 0.0
    for i in range(200):
        _, cond, draw_z = pool[i % len(pool)]
        u_left = _subsonic_state(rng, rho_range=(0.8, 1.4),
                                 mach_range=(-0.5, 0.5))
        u_right = u_left + 0.05 * rng.uniform(-1.0, 1.0, size=2)
        z_minus = draw_z(rng)
        z_plus = z_minus + 0.08 * rng.uniform(-1.0, 1.0,
                                              size=z_minus.shape)
        dec = solve_generalized_riemann(MODEL, cond, z_plus, z_minus,
                                        u_left, u_right)
        worst_residual = max(worst_residual, float(dec.residual))
        worst_defect = max(worst_defect, float(dec.junction_defect))
    print("generalized Riemann worst residual %.3e, junction defect %.3e"
          % (worst_residual, worst_defect))
    assert worst_residual <= 1e-11
    assert worst_defect <= 1e-11


def test_03_section_derivative_closed_forms():
    """The downstream-area derivative of the momentum correction matches
    its closed form for every cross-section variant within 1e-6 relative
    at 50 sampled states; the S variant's closed form is -q^2/(a rho)."""
    rng = np.random.default_rng(303)
    states = [(rng.uniform(0.6, 1.8), rng.uniform(-0.6, 0.6))
              for _ in range(50)]
    rows = section_derivative_comparison(MODEL, states=states, area=1.0)
    assert len(rows) == 4 * 50
    worst = 0.0
    for row in rows:
        rel = row["abs_error"] / max(abs(row["closed_form"]), 1.0)
        worst = max(worst, rel)
        if row["variant"] == "S":
            expected = -row["q"] ** 2 / (row["area"] * row["rho"])
            assert abs(row["closed_form"] - expected) <= 1e-12
    print("section derivative worst relative error: %.3e" % worst)
    assert worst <= 1e-6


def test_04_glimm_monotonicity_and_tv_bound(suite_runs):
    """In every standard-suite run the Glimm functional never increases
    across a logged interaction (tolerance 1e-12) and the total
    variation stays below 5 (TV(datum) + TV(geometry))."""
    assert len(suite_runs) == 8
    for name, (sc, tracker, _) in sorted(suite_runs.items()):
        series = tracker.functional_series
        upsilon = [row[3] for row in series]
        bad = [i for i in range(1, len(upsilon))
               if upsilon[i] > upsilon[i - 1] + 1e-12]
        assert not bad, "%s: functional grew at events %s" % (name, bad)

        breakpoints, states = sc.datum(sc.h)
        tv_datum = _datum_variation(breakpoints, states)
        stepped = sc.stepped_geometry(sc.h)
        tv_geometry = (stepped.total_variation()
                       if stepped is not None else 0.0)
        bound = 5.0 * (tv_datum + tv_geometry)
        print("%s: tv_max %.4f <= %.4f, %d monitored events"
              % (name, tracker.tv_max, bound, len(upsilon) - 1))
        assert tracker.tv_max <= bound, name


def test_05_nonphysical_strength_control(suite_runs):
    """Total non-physical front strength stays below 10 epsilon in every
    standard-suite run."""
    for name, (sc, tracker, _) in sorted(suite_runs.items()):
        total = tracker.nonphysical_strength()
        print("%s: non-physical strength %.3e (budget %.3e)"
              % (name, total, 10.0 * sc.epsilon))
        assert total <= 10.0 * sc.epsilon, name


def test_06_well_balanced_stationary_profile():
    """Starting from the discrete steady profile, no physical front of
    size > 1e-10 appears for t in [0, 1]: the stack of standing
    junctions is preserved exactly."""
    sc = scenarios.Scenario(scenarios.named_scenario("stationary_section_S"))
    assert sc.horizon >= 1.0
    tracker, trajectory = sc.run()
    physical = [f for f in tracker.fronts_in_order()
                if f.kind in ("shock", "rarefaction")
                and abs(f.size) > 1e-10]
    print("stationary run: %d events, %d physical fronts above 1e-10"
          % (tracker.events_resolved, len(physical)))
    assert tracker.events_resolved == 0
    assert not physical

    first = trajectory.snapshots[0]
    last = trajectory.snapshots[-1]
    drift = verify.l1_profile_distance(
        first["positions"], first["states"],
        last["positions"], last["states"], sc.window(sc.h))
    print("stationary run: final-profile drift %.3e" % drift)
    assert drift <= 1e-12


def test_07_smooth_limit_oracle_match(ramp_study):
    """Smooth cross-section scenario over h in {0.2, 0.1, 0.05, 0.025},
    epsilon = h^2: the L1 distance to the 2000-cell finite-volume
    reference decreases at every refinement and ends at most 0.3 times
    the first distance."""
    sc = ramp_study["scenario"]
    assert [h for h, _, _, _ in ramp_study["rungs"]] == [0.2, 0.1, 0.05,
                                                         0.025]
    window = tuple(sc.config["study"]["compare_window"])
    distances = []
    for h, epsilon, tracker, trajectory in ramp_study["rungs"]:
        assert epsilon == pytest.approx(h * h)
        snap = trajectory.snapshots[-1]
        distances.append(verify.l1_distance_to_cells(
            snap["positions"], snap["states"], ramp_study["oracle"],
            window=window))
    print("oracle distances: " + " ".join("%.6e" % d for d in distances))
    for coarse, fine in zip(distances, distances[1:]):
        assert fine < coarse
    assert distances[-1] <= 0.3 * distances[0]


def test_08_refinement_cauchy_property(arc_ladder):
    """Arc-pipe scenario over the same halving ladder: successive L1
    distances decrease and the last is at most 0.25 times the first."""
    sc = arc_ladder["scenario"]
    assert sc.h_list == [0.2, 0.1, 0.05, 0.025]
    profiles = arc_ladder["profiles"]
    window = arc_ladder["window"]
    distances = [
        verify.l1_profile_distance(*profiles[i - 1], *profiles[i], window)
        for i in range(1, len(profiles))]
    print("successive distances: " + " ".join("%.6e" % d
                                              for d in distances))
    for coarse, fine in zip(distances, distances[1:]):
        assert fine < coarse
    assert distances[-1] <= 0.25 * distances[0]


def test_09_weak_form_residual(ramp_study):
    """Weak-form residual over the 12-bump battery: at most 1e-2 at
    (h, epsilon) = (0.05, 2.5e-3) and decreasing under refinement."""
    sc = ramp_study["scenario"]
    domain = sc.window()
    residuals = []
    for h, epsilon, tracker, trajectory in ramp_study["rungs"]:
        if h < 0.05 - 1e-12:
            continue
        battery = verify.default_test_battery(sc.geometry, domain,
                                              sc.horizon, count=12)
        assert len(battery) == 12
        residual = verify.weak_residual(
            sc.model, trajectory, sc.geometry, sc.condition,
            test_functions=battery, window=domain)
        residuals.append((h, epsilon, float(residual)))
    print("weak residuals: " + " ".join("h=%g:%.4e" % (h, r)
                                        for h, _, r in residuals))
    assert residuals[-1][0] == pytest.approx(0.05)
    assert residuals[-1][1] == pytest.approx(2.5e-3)
    assert residuals[-1][2] <= 1e-2
    values = [r for _, _, r in residuals]
    for coarse, fine in zip(values, values[1:]):
        assert fine < coarse


def test_10_mass_conservation():
    """Kink scenarios conserve the plain density integral and section
    scenarios the area-weighted density integral within 1e-10, for
    compactly supported perturbations of a steady background."""
    window = (-2.2, 1.8)

    suite = scenarios.standard_suite()
    for name in ("kink_pipe", "kink_polyline"):
        cfg = suite[name]
        cfg["numerics"]["rho_threshold"] = 0.0
        cfg["numerics"]["snapshots"] = [0.0, cfg["numerics"]["horizon"]]
        sc = scenarios.Scenario(cfg)
        tracker, trajectory = sc.run()
        first, last = trajectory.snapshots[0], trajectory.snapshots[-1]
        drift = abs(
            _stair_integral(last["positions"], last["states"], window)
            - _stair_integral(first["positions"], first["states"], window))
        print("%s: density drift %.3e over %d events"
              % (name, drift, tracker.events_resolved))
        assert tracker.events_resolved > 0
        assert drift <= 1e-10, name

    for variant in ("L", "p", "P", "S"):
        cfg = {
            "schema_version": scenarios.SCHEMA_VERSION,
            "name": "conservation_%s" % variant,
            "seed": 0,
            "model": {"kind": "isentropic"},
            "condition": {"kind": "section", "variant": variant},
            "geometry": {"kind": "section_steps", "base_area": 1.0,
                         "steps": [[-0.4, 1.15], [0.3, 0.95]]},
            "datum": {"kind": "stationary", "upstream_state": [1.0, 0.2],
                      "perturbation": {"span": [-1.0, -0.7],
                                       "delta": [-0.01, 0.008]}},
            "numerics": {"epsilon": 1e-2, "h": 0.1, "horizon": 0.5,
                         "snapshots": [0.0, 0.5], "rho_threshold": 0.0},
        }
        sc = scenarios.Scenario(cfg)
        tracker, trajectory = sc.run()
        stepped = sc.stepped_geometry(sc.h)
        area = lambda x: float(stepped.value(x)[0])
        first, last = trajectory.snapshots[0], trajectory.snapshots[-1]
        drift = abs(
            _stair_integral(last["positions"], last["states"], window,
                            area)
            - _stair_integral(first["positions"], first["states"], window,
                              area))
        print("section %s: weighted density drift %.3e over %d events"
              % (variant, drift, tracker.events_resolved))
        assert tracker.events_resolved > 0
        assert drift <= 1e-10, variant


def test_11_euler_stationary_invariants():
    """Along Euler steady profiles over a factor-2 area change, the mass
    flux a rho v and the energy flux a v (E + p) are constant within
    1e-8."""
    model = EulerModel()
    state = model.primitive_to_state(1.0, 0.3, 1.0)
    samples = stationary_profile(model, 1.0, 2.0, state,
                                 return_samples=True)
    assert len(samples) > 100
    mass = []
    energy = []
    for area, u in samples:
        rho, v, p = model.primitives(u)
        mass.append(area * rho * v)
        energy.append(area * v * (float(u[2]) + p))
    mass = np.asarray(mass)
    energy = np.asarray(energy)
    mass_spread = float(np.max(np.abs(mass - mass[0])))
    energy_spread = float(np.max(np.abs(energy - energy[0])))
    print("Euler invariants: mass-flux spread %.3e, energy-flux spread "
          "%.3e" % (mass_spread, energy_spread))
    assert mass_spread <= 1e-8
    assert energy_spread <= 1e-8


def test_12_interaction_constant_stability():
    """The sampled interaction / transmission constants are finite and
    change by less than 20% when the sample count doubles from 500 to
    1000."""
    cond = make_section_condition("S")
    z_pairs = [([1.0], [1.15]), ([1.0], [0.9])]
    small = verify.interaction_estimate_sampler(MODEL, cond, samples=500,
                                                z_pairs=z_pairs)
    large = verify.interaction_estimate_sampler(MODEL, cond, samples=1000,
                                                z_pairs=z_pairs)
    keys = ("wave_wave", "transport_growth", "commuting_defect",
            "wave_junction", "junction_transport", "coupling_lipschitz")
    for key in keys:
        lo, hi = small[key], large[key]
        assert np.isfinite(lo) and np.isfinite(hi)
        assert lo > 0.0, key
        change = hi / lo - 1.0
        print("%s: %.6e -> %.6e (%+.2f%%)" % (key, lo, hi, 100 * change))
        assert abs(change) < 0.20, key
