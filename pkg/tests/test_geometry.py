import math

import numpy as np
import pytest

from pipetrack.errors import ConfigError
from pipetrack.geometry import (
    LinearPiece,
    PipeGeometry,
    SmoothRampPiece,
    StepGeometry,
    TangentArcPiece,
    build_step_geometry,
    check_step_conditions,
    curved_pipe_geometry,
    kinked_pipe_geometry,
    l1_distance_to_geometry,
    linear_parameter_geometry,
    section_ramp_geometry,
    section_step_geometry,
)


def test_right_angle_kink_atom_size():
    geom = kinked_pipe_geometry([(0.0, 0.5 * math.pi)])
    (x, delta), = geom.atoms
    assert x == 0.0
    assert np.linalg.norm(delta) == pytest.approx(math.sqrt(2.0), abs=1e-15)
    assert np.allclose(geom.value(-1.0), [1.0, 0.0])
    assert np.allclose(geom.value_plus(0.0), [0.0, 1.0])
    # left-continuity: the kink is not yet visible at its own position
    assert np.allclose(geom.value(0.0), [1.0, 0.0])
    assert geom.total_variation() == pytest.approx(math.sqrt(2.0))


def test_arc_density_is_inverse_radius():
    radius = 2.5
    geom = curved_pipe_geometry(
        [{"kind": "straight", "length": 1.0},
         {"kind": "arc", "radius": radius, "angle": 0.8},
         {"kind": "straight", "length": 1.0}])
    piece, = geom.pieces
    for x in np.linspace(piece.x_lo, piece.x_hi, 9):
        assert geom.density_magnitude(x) == pytest.approx(1.0 / radius,
                                                          abs=1e-14)
        assert np.linalg.norm(geom.density_direction(x)) == pytest.approx(1.0)
    # variation of the tangent along the arc equals the turned angle
    assert geom.total_variation() == pytest.approx(0.8, abs=1e-14)
    # straight parts carry no derivative
    assert geom.density_magnitude(piece.x_lo - 0.5) == 0.0
    assert geom.density_magnitude(piece.x_hi + 0.5) == 0.0


def test_curved_pipe_tangent_stays_unit():
    geom = curved_pipe_geometry(
        [{"kind": "straight", "length": 0.5},
         {"kind": "kink", "angle": 0.3},
         {"kind": "arc", "radius": 1.0, "angle": -0.7},
         {"kind": "kink", "angle": -0.2},
         {"kind": "arc", "radius": 0.5, "angle": 0.4}])
    for x in np.linspace(-2.0, 2.0, 401):
        assert abs(np.linalg.norm(geom.value(x)) - 1.0) < 1e-12
    # value accumulates every turn
    theta_end = 0.3 - 0.7 - 0.2 + 0.4
    assert np.allclose(geom.value(10.0),
                       [math.cos(theta_end), math.sin(theta_end)],
                       atol=1e-12)


def test_unit_norm_violation_rejected():
    with pytest.raises(ConfigError):
        PipeGeometry([1.0, 0.0], atoms=[(0.0, np.array([0.5, 0.0]))],
                     unit_norm=True)


def test_variation_endpoint_conventions():
    geom = section_step_geometry(1.0, [(0.0, 1.5), (1.0, 1.2)])
    assert geom.variation(0.0, 1.0) == pytest.approx(0.0)
    assert geom.variation(0.0, 1.0, include_a=True) == pytest.approx(0.5)
    assert geom.variation(0.0, 1.0, include_b=True) == pytest.approx(0.3)
    assert geom.variation(-1.0, 2.0) == pytest.approx(0.8)
    assert geom.total_variation() == pytest.approx(0.8)


def test_ramp_variation_and_value():
    geom = section_ramp_geometry(1.0, 2.0, (-1.0, 1.0))
    assert geom.value(-1.0)[0] == pytest.approx(1.0)
    assert geom.value(0.0)[0] == pytest.approx(1.5)
    assert geom.value_plus(1.0)[0] == pytest.approx(2.0)
    assert geom.total_variation() == pytest.approx(1.0, abs=1e-14)
    # midpoint split is additive
    left = geom.variation(-5.0, 0.0)
    right = geom.variation(0.0, 5.0)
    assert left + right == pytest.approx(1.0, abs=1e-12)
    # density integrates back to the increment
    xs = np.linspace(-1.0, 1.0, 20001)
    integral = np.trapezoid([geom.density(x)[0] for x in xs], xs)
    assert integral == pytest.approx(1.0, abs=1e-8)


def test_piece_direction_oscillation():
    arc = TangentArcPiece(0.0, 2.0, 0.0, 0.5)
    # tangent direction turns by rate*(b-a); chord length of that turn
    assert arc.direction_oscillation(0.0, 1.0) == pytest.approx(
        2.0 * math.sin(0.25), abs=1e-14)
    assert LinearPiece(0.0, 1.0, [1.0]).direction_oscillation(0.0, 1.0) == 0.0
    assert SmoothRampPiece(0.0, 1.0, [2.0]).direction_oscillation(
        0.2, 0.8) == 0.0


def test_step_geometry_value_conventions():
    step = StepGeometry([0.0, 1.0], [[1.0], [2.0], [3.0]])
    assert step.value(-0.5)[0] == 1.0
    assert step.value(0.0)[0] == 1.0      # left-continuous
    assert step.value_plus(0.0)[0] == 2.0
    assert step.value(0.5)[0] == 2.0
    assert step.value(1.0)[0] == 2.0
    assert step.value(1.5)[0] == 3.0
    assert step.total_variation() == pytest.approx(2.0)
    assert step.variation(0.0, 1.0) == pytest.approx(1.0)  # [0, 1)
    jumps = step.jumps()
    assert [j[0] for j in jumps] == [0.0, 1.0]


def test_build_retains_large_jumps_exactly():
    geom = kinked_pipe_geometry([(0.0, 0.5 * math.pi)])
    h = 0.25
    step = build_step_geometry(geom, h)
    assert 0.0 in step.designated
    idx = int(np.searchsorted(step.breakpoints, 0.0))
    assert step.breakpoints[idx] == 0.0
    jump = step.values[idx + 1] - step.values[idx]
    assert np.linalg.norm(jump - np.array([-1.0, 1.0])) < 1e-12
    checks = check_step_conditions(geom, step, h)
    assert all(checks.values()), checks


def test_build_conditions_on_arc():
    geom = curved_pipe_geometry(
        [{"kind": "straight", "length": 1.0},
         {"kind": "arc", "radius": 1.0, "angle": 1.2},
         {"kind": "straight", "length": 1.0}])
    for h in (0.4, 0.2, 0.1):
        step = build_step_geometry(geom, h)
        checks = check_step_conditions(geom, step, h)
        assert all(checks.values()), (h, checks)
        assert step.breakpoints[0] < -1.0 / h
        assert step.breakpoints[-1] > 1.0 / h
        gaps = np.diff(step.breakpoints)
        assert gaps.max() < h
        # every staircase jump is below h except designated ones
        for x, lo, hi in step.jumps():
            if x not in step.designated:
                assert np.linalg.norm(hi - lo) < h


def test_build_drops_small_jump_tail():
    # many tiny kinks below the retention threshold plus one large kink
    rng = np.random.default_rng(7)
    kinks = [(float(x), 1e-4 * float(rng.uniform(0.5, 1.0)))
             for x in np.linspace(-0.9, 0.9, 10)]
    kinks.insert(5, (0.05, 0.6))
    kinks.sort()
    geom = kinked_pipe_geometry(kinks)
    h = 0.5
    step = build_step_geometry(geom, h)
    assert step.designated == (0.05,)
    omitted = sum(np.linalg.norm(d) for x, d in geom.atoms
                  if x not in step.designated)
    assert omitted < h


def test_build_variation_window_property():
    geom = curved_pipe_geometry(
        [{"kind": "straight", "length": 0.6},
         {"kind": "kink", "angle": 0.7},
         {"kind": "arc", "radius": 2.0, "angle": -0.9},
         {"kind": "straight", "length": 0.6}])
    h = 0.2
    step = build_step_geometry(geom, h)
    rng = np.random.default_rng(11)
    for _ in range(200):
        y, x = np.sort(rng.uniform(-4.0, 4.0, size=2))
        lhs = step.variation(y, x)
        rhs = h + geom.variation(y, x, include_a=True, include_b=True)
        assert lhs <= rhs + 1e-12, (y, x, lhs, rhs)


def test_build_l1_distance_decreases():
    geom = curved_pipe_geometry(
        [{"kind": "straight", "length": 1.0},
         {"kind": "arc", "radius": 1.5, "angle": 1.0},
         {"kind": "kink", "angle": 0.4},
         {"kind": "straight", "length": 1.0}])
    dists = []
    for h in (0.4, 0.2, 0.1):
        step = build_step_geometry(geom, h)
        dists.append(l1_distance_to_geometry(step, geom, (-2.5, 2.5)))
    assert dists[1] < dists[0]
    assert dists[2] < dists[1]
    assert dists[2] < 0.1


def test_build_matches_values_off_jumps():
    geom = section_ramp_geometry(1.0, 2.0, (-0.5, 0.5))
    h = 0.1
    step = build_step_geometry(geom, h)
    rng = np.random.default_rng(3)
    for x in rng.uniform(-2.0, 2.0, size=100):
        err = np.linalg.norm(step.value(x) - geom.value(x))
        assert err < h, (x, err)


def test_section_builders_reject_bad_area():
    with pytest.raises(ConfigError):
        section_step_geometry(1.0, [(0.0, -0.5)])
    with pytest.raises(ConfigError):
        section_ramp_geometry(-1.0, 2.0, (0.0, 1.0))


def test_linear_parameter_geometry():
    geom = linear_parameter_geometry(0.0, [0.5], (-1.0, 1.0))
    assert geom.value(0.0)[0] == pytest.approx(0.5)
    assert geom.total_variation() == pytest.approx(1.0)
    step = build_step_geometry(geom, 0.25)
    assert all(check_step_conditions(geom, step, 0.25).values())
