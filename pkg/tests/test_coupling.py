import numpy as np
import pytest

from pipetrack.coupling import (KinkCondition, ProductCondition,
                                SectionCondition, junction_map,
                                make_kink_condition, make_product_condition,
                                make_section_condition, stationary_profile)
from pipetrack.errors import JunctionSolvabilityError, SonicTransitionError
from pipetrack.models import EulerModel, IsentropicModel


def model():
    return IsentropicModel()


def random_states(m, rng, count, shrink=0.8):
    w0 = m.riemann_coordinates(m.reference_state)
    r = m.state_radius * shrink
    out = []
    while len(out) < count:
        try:
            out.append(m.state_from_riemann_coordinates(
                w0 + rng.uniform(-r, r, size=len(w0))))
        except ValueError:
            continue
    return out


def unit(theta):
    return np.array([np.cos(theta), np.sin(theta)])


ALL_CONDITIONS = [
    ("kink", make_kink_condition(0.5)),
    ("L", make_section_condition("L")),
    ("p", make_section_condition("p")),
    ("P", make_section_condition("P")),
    ("S", make_section_condition("S")),
]


def draw_parameters(name, rng):
    if name == "kink":
        t0 = rng.uniform(0, 2 * np.pi)
        return unit(t0 + rng.uniform(-0.4, 0.4)), unit(t0)
    a = rng.uniform(0.7, 1.5)
    return np.array([a * np.exp(rng.uniform(-0.3, 0.3))]), np.array([a])


# -- reference values --------------------------------------------------------

def test_kink_right_angle_reference_value():
    cond = make_kink_condition(0.5)
    xi = cond.evaluate(np.array([0.0, 1.0]), np.array([1.0, 0.0]),
                       np.array([1.0, 0.5]))
    assert xi[0] == 0.0
    assert xi[1] == pytest.approx(-0.5 * np.sqrt(2.0) * 0.5, abs=1e-12)
    assert xi[1] == pytest.approx(-0.35355, abs=1e-5)


def test_kink_dini_reference_value():
    cond = make_kink_condition(0.5)
    d = cond.dini(np.array([1.0, 0.0]), np.array([0.0, 1.0]),
                  np.array([1.0, 0.5]))
    assert np.allclose(d, [0.0, -0.25], atol=1e-12)


def test_kink_custom_drag_must_vanish_at_zero():
    with pytest.raises(ValueError):
        make_kink_condition(drag=lambda eta, u: eta + 0.1)
    cond = make_kink_condition(drag=lambda eta, u: -0.5 * eta * u[1])
    ref = make_kink_condition(0.5)
    zp, zm = unit(1.3), unit(1.0)
    u = np.array([1.1, 0.3])
    assert np.allclose(cond.evaluate(zp, zm, u), ref.evaluate(zp, zm, u),
                       atol=1e-12)
    assert np.allclose(cond.dini(zm, unit(0.3), u), ref.dini(zm, unit(0.3), u),
                       atol=1e-6)


def test_section_P_reference_value():
    cond = make_section_condition("P")
    xi = cond.evaluate([2.0], [1.0], np.array([1.0, 0.2]))
    assert np.allclose(xi, [-0.1, 0.0], atol=1e-14)


def test_section_L_reference_value():
    cond = make_section_condition("L")
    xi = cond.evaluate([2.0], [1.0], np.array([1.0, 0.2]))
    assert xi[0] == pytest.approx(-0.1, abs=1e-14)
    assert xi[1] == pytest.approx(-0.52, abs=1e-14)  # (0.5-1)*(0.04+1)


def test_all_conditions_vanish_on_equal_parameters():
    rng = np.random.default_rng(2)
    m = model()
    states = random_states(m, rng, 1000)
    for name, cond in ALL_CONDITIONS:
        for u in states[:250]:
            _, zm = draw_parameters(name, rng)
            xi = cond.evaluate(zm, zm, u)
            assert np.max(np.abs(xi)) <= 1e-14


def test_dini_matches_short_expansions():
    # |evaluate(z + t v, z, u) - t dini(z, v, u)| / t shrinks with t
    rng = np.random.default_rng(4)
    m = model()
    for name, cond in ALL_CONDITIONS:
        for u in random_states(m, rng, 5):
            zp, zm = draw_parameters(name, rng)
            if name == "kink":
                v = unit(rng.uniform(0, 2 * np.pi))
            else:
                v = np.array([1.0])
            gaps = []
            for t in (1e-2, 1e-3, 1e-4):
                if name == "kink":
                    # stay on the unit circle: rotate by angle t
                    theta = np.arctan2(zm[1], zm[0])
                    z_t = unit(theta + t)
                    v = (z_t - zm) / t
                    v = v / np.linalg.norm(v)
                    z_t = unit(theta + t)
                else:
                    z_t = zm + t * v
                gap = np.linalg.norm(cond.evaluate(z_t, zm, u)
                                     - t * cond.dini(zm, v, u)) / t
                gaps.append(gap)
            assert gaps[-1] <= gaps[0] + 1e-9
            assert gaps[-1] <= 1e-3


def test_lipschitz_in_state_scaled_by_jump_size():
    # |Xi(z+, z-, u2) - Xi(z+, z-, u1)| <= C |z+ - z-| |u2 - u1|
    rng = np.random.default_rng(6)
    m = model()
    states = random_states(m, rng, 2000)
    worst = 0.0
    for name, cond in ALL_CONDITIONS:
        for k in range(0, 1000, 2):
            u1, u2 = states[k], states[k + 1]
            zp, zm = draw_parameters(name, rng)
            dz = np.linalg.norm(np.asarray(zp, float).reshape(-1)
                                - np.asarray(zm, float).reshape(-1))
            if dz < 1e-6:
                continue
            du = np.linalg.norm(u2 - u1)
            gap = np.linalg.norm(cond.evaluate(zp, zm, u2)
                                 - cond.evaluate(zp, zm, u1))
            worst = max(worst, gap / (dz * du))
    assert worst < 20.0


def test_section_variants_differ_by_quadrature_term():
    s_cond = make_section_condition("S")
    l_cond = make_section_condition("L")
    u = np.array([1.0, 0.2])
    xi_s = s_cond.evaluate([2.0], [1.0], u)
    xi_l = l_cond.evaluate([2.0], [1.0], u)
    assert xi_s[0] == xi_l[0]
    assert xi_s[1] != pytest.approx(xi_l[1], abs=1e-6)


def test_section_S_closed_form_matches_simpson_quadrature():
    cond = make_section_condition("S")
    rng = np.random.default_rng(8)
    m = model()
    for u in random_states(m, rng, 10):
        for ap in (1.3, 2.0, 0.8):
            xi = cond.evaluate([ap], [1.0], u)
            quad = cond.simpson_quadrature([ap], [1.0], u)
            assert xi[1] == pytest.approx(quad, abs=2e-9)


def test_section_derivative_table_by_finite_differences():
    # finite-difference derivative of the momentum correction in the
    # downstream area, at equal areas, against the closed forms
    rng = np.random.default_rng(10)
    m = model()
    t = 1e-6
    for u in random_states(m, rng, 50):
        rho, q = u
        a = rng.uniform(0.7, 1.4)
        expected = {
            "L": -(q * q / rho + m.pressure(rho)) / a,
            "p": -2.0 * q * q / (rho * a),
            "P": 0.0,
            "S": -q * q / (rho * a),
        }
        for name, cond in ALL_CONDITIONS[1:]:
            fd = (cond.evaluate([a + t], [a], u)[1]
                  - cond.evaluate([a], [a], u)[1]) / t
            assert fd == pytest.approx(expected[name], rel=1e-5, abs=1e-7)
            d = cond.dini([a], [1.0], u)[1]
            assert d == pytest.approx(expected[name], rel=1e-12, abs=1e-14)


def test_section_S_dini_reference_value():
    cond = make_section_condition("S")
    d = cond.dini([1.0], [1.0], np.array([1.0, 0.2]))
    assert d[1] == pytest.approx(-0.04, abs=1e-12)


def test_product_condition_forms():
    # potential independent of the geometry value -> no correction
    cond = make_product_condition(lambda z, u: np.array([0.0, u[1]]))
    assert np.allclose(cond.evaluate([1.0], [2.0], np.array([1.0, 0.2])), 0.0)
    # linear potential -> correction is the geometry increment
    lin = make_product_condition(lambda z, u: np.array([0.0, float(z[0])]))
    xi = lin.evaluate([1.5], [1.2], np.array([1.0, 0.2]))
    assert np.allclose(xi, [0.0, 0.3], atol=1e-12)
    # finite-difference dini against an analytic gradient
    pot = make_product_condition(
        lambda z, u: np.array([0.0, np.sin(float(z[0])) * u[1]]),
        potential_gradient=lambda z, u: np.array([[0.0],
                                                  [np.cos(float(z[0]))
                                                   * u[1]]]))
    u = np.array([1.0, 0.3])
    fd = ProductCondition(pot.potential).dini([0.7], [1.0], u)
    assert np.allclose(fd, pot.dini([0.7], [1.0], u), atol=1e-6)


# -- transfer map ------------------------------------------------------------

def test_transfer_identity_on_equal_parameters():
    m = model()
    rng = np.random.default_rng(12)
    for name, cond in ALL_CONDITIONS:
        for u in random_states(m, rng, 20):
            _, zm = draw_parameters(name, rng)
            out = junction_map(m, cond, zm, zm, u)
            assert np.allclose(out, u, atol=1e-12)


def test_transfer_reference_value_variant_P():
    m = model()
    cond = make_section_condition("P")
    out = junction_map(m, cond, [2.0], [1.0], np.array([1.0, 0.2]))
    assert out[1] == pytest.approx(0.1, abs=1e-14)
    assert out[0] == pytest.approx(1.0150, abs=2e-4)
    # the root solves rho^2 + 0.01/rho = 1.04 on the subsonic branch
    assert out[0] ** 2 + 0.01 / out[0] == pytest.approx(1.04, abs=1e-12)


def test_transfer_residual_and_mass_coupling():
    m = model()
    rng = np.random.default_rng(14)
    states = random_states(m, rng, 250)
    for name, cond in ALL_CONDITIONS:
        for u in states[:50]:
            zp, zm = draw_parameters(name, rng)
            out = junction_map(m, cond, zp, zm, u)
            resid = m.flux(out) - m.flux(u) - cond.evaluate(zp, zm, u)
            assert np.linalg.norm(resid) <= 1e-12
            if isinstance(cond, SectionCondition):
                # a q stays exactly continuous across the junction
                assert zp[0] * out[1] == pytest.approx(zm[0] * u[1],
                                                       abs=1e-12)


def test_transfer_conserved_combinations_for_L_and_P():
    m = model()
    u = np.array([1.05, 0.25])
    # variant L: area times momentum flux continuous
    out = junction_map(m, make_section_condition("L"), [1.6], [1.0], u)
    lhs = 1.6 * (out[1] ** 2 / out[0] + m.pressure(out[0]))
    rhs = 1.0 * (u[1] ** 2 / u[0] + m.pressure(u[0]))
    assert lhs == pytest.approx(rhs, abs=1e-11)
    # variant P: momentum flux itself continuous
    out = junction_map(m, make_section_condition("P"), [1.6], [1.0], u)
    assert out[1] ** 2 / out[0] + m.pressure(out[0]) == pytest.approx(
        u[1] ** 2 / u[0] + m.pressure(u[0]), abs=1e-11)


def test_transfer_is_lipschitz_in_the_jump():
    m = model()
    rng = np.random.default_rng(16)
    ratios = []
    for name, cond in ALL_CONDITIONS:
        for u in random_states(m, rng, 100):
            zp, zm = draw_parameters(name, rng)
            dz = np.linalg.norm(np.asarray(zp, float).reshape(-1)
                                - np.asarray(zm, float).reshape(-1))
            if dz < 1e-8:
                continue
            out = junction_map(m, cond, zp, zm, u)
            ratios.append(np.linalg.norm(out - u) / dz)
    assert max(ratios) < 10.0


def test_transfer_rejects_large_jumps_and_supersonic_data():
    m = model()
    cond = make_section_condition("P")
    # radius bounds the deviation from the jump midpoint; a factor-2 area
    # change sits exactly on the boundary, anything wider is rejected
    junction_map(m, cond, [2.0], [1.0], np.array([1.0, 0.2]), z_radius=0.5)
    with pytest.raises(JunctionSolvabilityError):
        junction_map(m, cond, [2.2], [1.0], np.array([1.0, 0.2]),
                     z_radius=0.5)
    with pytest.raises(JunctionSolvabilityError):
        junction_map(m, cond, [1.1], [1.0], np.array([1.0, 2.0]))


# -- stationary profiles ------------------------------------------------------

def test_profile_empty_integration_returns_start():
    m = model()
    u = np.array([1.0, 0.2])
    assert np.allclose(stationary_profile(m, 1.0, 1.0, u), u, atol=0)


def test_profile_flow_rate_is_exact():
    m = model()
    out = stationary_profile(m, 1.0, 2.0, np.array([1.0, 0.2]))
    assert out[1] == pytest.approx(0.1, abs=1e-16)


def test_profile_matches_transfer_for_variant_S():
    # the S-variant transfer map reproduces the smooth stationary profile
    m = model()
    cond = make_section_condition("S", profile_steps=64)
    u = np.array([1.0, 0.2])
    for ap in (1.5, 2.0, 0.7):
        via_T = junction_map(m, cond, [ap], [1.0], u)
        via_ode = stationary_profile(m, 1.0, ap, u, steps=64)
        assert np.allclose(via_T, via_ode, atol=1e-11)


def test_profile_sonic_transition_raises():
    m = model()
    # narrowing pipe accelerates the flow toward the sonic point
    with pytest.raises(SonicTransitionError):
        stationary_profile(m, 1.0, 0.02, np.array([1.0, 0.45]))


def test_profile_refines_to_machine_scale():
    m = model()
    u = np.array([1.0, 0.2])
    coarse = stationary_profile(m, 1.0, 2.0, u, steps=64)
    fine = stationary_profile(m, 1.0, 2.0, u, steps=1024)
    assert np.allclose(coarse, fine, atol=1e-10)


def test_euler_profile_invariants():
    m = EulerModel()
    u = m.primitive_to_state(1.0, 0.3, 1.0)
    samples = stationary_profile(m, 1.0, 2.0, u, steps=512,
                                 return_samples=True)
    flows, energies, entropies = [], [], []
    for a, state in samples:
        rho, v, p = m.primitives(state)
        flows.append(a * rho * v)
        energies.append(a * v * (state[2] + p))
        entropies.append(m.entropy(state))
    assert np.ptp(flows) <= 1e-8
    assert np.ptp(energies) <= 1e-8
    assert np.ptp(entropies) <= 1e-10
