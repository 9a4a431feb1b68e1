#!/usr/bin/env python3
"""
Tests for the two-party and N-party mean-field dynamics.
"""

import numpy as np
import pytest

from affective_polarization.core import InfluenceMeasureKind, ModelParams, logistic
from affective_polarization.errors import ConfigError, ParameterError
from affective_polarization.meanfield import (
    EmotionMatrix,
    MeanFieldState,
    MultiPartyState,
    TwoPartyConfig,
    integrate_multi_party,
    integrate_two_party,
    multi_party_derivative,
    multi_party_frame,
    multi_party_rates,
    theta_arrays,
    trajectory_frame,
    two_party_derivative,
    two_party_rates,
)

MASKING = ModelParams(3.75, 0.25, 0.63)
DEF1 = InfluenceMeasureKind.DEGREE_NORMALIZED_COUNT
DEF2 = InfluenceMeasureKind.GROUP_FRACTION


def config(params=MASKING, r=0.18, measure=DEF1, theta0=(0.9, 0.9), epsilon=0.01, t_end=10.0):
    return TwoPartyConfig(params, r, measure, theta0, epsilon, t_end)


# -- rates and derivative ------------------------------------------------------

@pytest.mark.parametrize("measure", [DEF1, DEF2])
def test_rates_at_one_half_equal_inertia_only(measure):
    params = ModelParams(4.0, 2.5, 0.8)
    rates = two_party_rates(MeanFieldState(0.5, 0.5), config(params, 0.3, measure))
    for p in rates:
        assert p == pytest.approx(logistic(-0.8), abs=1e-15)


def test_rates_direct_evaluation():
    rates = two_party_rates(MeanFieldState(1.0, 0.5), config(ModelParams(1.0, 0.0, 0.0), 0.5))
    assert rates[0] == pytest.approx(0.6225, abs=1e-4)
    assert rates[1] == pytest.approx(0.3775, abs=1e-4)
    assert rates[0] == pytest.approx(logistic(0.5))


def test_group_fraction_rates_are_symmetric_for_equal_prevalence():
    p_b01, p_b10, p_r01, p_r10 = two_party_rates(MeanFieldState(0.7, 0.7), config(measure=DEF2))
    assert (p_b01, p_b10) == (p_r01, p_r10)


def test_one_half_is_a_fixed_point():
    rng = np.random.default_rng(0)
    for _ in range(100):
        params = ModelParams(*rng.uniform(0, 10, size=3))
        r = rng.uniform(0.05, 0.95)
        for measure in (DEF1, DEF2):
            assert two_party_derivative(MeanFieldState(0.5, 0.5), config(params, r, measure)) == (0.0, 0.0)


def test_flow_points_inward_at_the_boundary():
    rng = np.random.default_rng(1)
    for _ in range(100):
        cfg = config(ModelParams(*rng.uniform(0, 10, size=3)), rng.uniform(0.05, 0.95))
        other = rng.uniform()
        assert two_party_derivative(MeanFieldState(1.0, other), cfg)[0] <= 0.0
        assert two_party_derivative(MeanFieldState(0.0, other), cfg)[0] >= 0.0
        assert two_party_derivative(MeanFieldState(other, 1.0), cfg)[1] <= 0.0
        assert two_party_derivative(MeanFieldState(other, 0.0), cfg)[1] >= 0.0


def test_masking_start_red_declines_faster():
    d_blue, d_red = two_party_derivative(MeanFieldState(0.9, 0.9), config())
    assert d_red < 0.0
    assert d_blue > d_red


# -- integration -----------------------------------------------------------------

def test_trajectory_grid_and_initial_row():
    states = integrate_two_party(config(t_end=1.0))
    assert len(states) == 101
    assert states[0] == MeanFieldState(0.9, 0.9, 0.0)
    assert states[-1].t == pytest.approx(1.0)


def test_fixed_point_start_stays_constant():
    states = integrate_two_party(config(ModelParams(6.0, 6.0, 4.0), 0.3, theta0=(0.5, 0.5)))
    assert all(s.theta_blue == 0.5 and s.theta_red == 0.5 for s in states)


def test_strong_out_group_hate_separates_the_groups():
    states = integrate_two_party(config(ModelParams(6.0, 6.0, 4.0), 0.3, theta0=(0.8, 0.8), t_end=100.0))
    blue, red = states[-1].theta_blue, states[-1].theta_red
    assert blue > 0.9
    assert red < 0.1


def test_masking_keeps_a_partisan_gap():
    states = integrate_two_party(config(t_end=100.0))
    _, blue, red = theta_arrays(states)
    assert blue[-1] - red[-1] > 0.1
    assert blue[-1] > 0.5


def test_euler_step_matches_the_closed_form():
    cfg = config(epsilon=0.05, t_end=0.05)
    first, second = integrate_two_party(cfg)
    d_blue, d_red = two_party_derivative(first, cfg)
    assert second.theta_blue == first.theta_blue + 0.05 * d_blue
    assert second.theta_red == first.theta_red + 0.05 * d_red


def test_trajectories_stay_in_the_unit_square():
    rng = np.random.default_rng(2)
    for _ in range(20):
        cfg = config(ModelParams(*rng.uniform(0, 20, size=3)), rng.uniform(0.05, 0.95),
                     theta0=tuple(rng.uniform(size=2)), epsilon=0.1, t_end=20.0)
        _, blue, red = theta_arrays(integrate_two_party(cfg))
        assert blue.min() >= 0.0 and blue.max() <= 1.0
        assert red.min() >= 0.0 and red.max() <= 1.0


def test_group_fraction_equal_starts_move_together():
    states = integrate_two_party(config(ModelParams(5.0, 1.5, 0.3), 0.3, DEF2, (0.8, 0.8), t_end=50.0))
    _, blue, red = theta_arrays(states)
    assert np.max(np.abs(blue - red)) <= 1e-12


def test_relabelling_mirrors_the_trajectory():
    cfg = config(ModelParams(5.0, 1.0, 0.5), 0.35, theta0=(0.75, 0.625), t_end=10.0)
    _, blue, red = theta_arrays(integrate_two_party(cfg))
    _, blue_m, red_m = theta_arrays(integrate_two_party(cfg.replace(theta0=(0.25, 0.375))))
    assert np.allclose(blue_m, 1.0 - blue, rtol=0, atol=1e-10)
    assert np.allclose(red_m, 1.0 - red, rtol=0, atol=1e-10)


def test_euler_is_first_order():
    coarse = integrate_two_party(config(epsilon=0.04, t_end=5.0))[-1]
    medium = integrate_two_party(config(epsilon=0.02, t_end=5.0))[-1]
    fine = integrate_two_party(config(epsilon=0.01, t_end=5.0))[-1]
    first = np.hypot(coarse.theta_blue - medium.theta_blue, coarse.theta_red - medium.theta_red)
    second = np.hypot(medium.theta_blue - fine.theta_blue, medium.theta_red - fine.theta_red)
    assert first / second >= 1.5


def test_rk45_tracks_euler():
    euler = integrate_two_party(config(t_end=20.0))
    rk = integrate_two_party(config(t_end=20.0), method="rk45")
    assert len(rk) == len(euler)
    assert rk[-1].t == pytest.approx(euler[-1].t)
    assert rk[-1].theta_blue == pytest.approx(euler[-1].theta_blue, abs=0.02)
    assert rk[-1].theta_red == pytest.approx(euler[-1].theta_red, abs=0.02)
    with pytest.raises(ConfigError):
        integrate_two_party(config(), method="heun")


# -- configuration -------------------------------------------------------------

def test_config_validation():
    with pytest.raises(ConfigError):
        config(measure="messages")
    with pytest.raises(ParameterError):
        config(r=0.0)
    with pytest.raises(ParameterError):
        config(r=1.0)
    with pytest.raises(ParameterError):
        config(epsilon=0.2)
    with pytest.raises(ParameterError):
        config(epsilon=0.0)
    with pytest.raises(ParameterError):
        config(theta0=(1.1, 0.5))
    with pytest.raises(ParameterError):
        MeanFieldState(-0.1, 0.5)
    assert config(measure="definition2").measure is DEF2
    assert config(t_end=2.0, epsilon=0.01).n_steps == 200


def test_trajectory_frame_layout():
    states = integrate_two_party(config(t_end=0.03))
    frame = trajectory_frame(states)
    assert list(frame.columns) == ["t", "days", "group", "theta"]
    assert list(frame["group"]) == ["blue"] * 4 + ["red"] * 4
    assert frame["days"].iloc[-1] == pytest.approx(0.21)
    assert trajectory_frame(states, days_per_unit=1.0)["days"].iloc[1] == pytest.approx(0.01)


# -- N-party system --------------------------------------------------------------

def test_emotion_matrix_validation():
    with pytest.raises(ParameterError):
        EmotionMatrix([[1, 0, 0], [0, 1, 0]], [0.5, 0.5], 0.0)
    with pytest.raises(ParameterError):
        EmotionMatrix([[1, 0], [0, 1]], [0.6, 0.6], 0.0)
    with pytest.raises(ParameterError):
        EmotionMatrix([[1, 0], [0, 1]], [0.5, 0.5], [-1.0, 0.0])
    with pytest.raises(ParameterError):
        EmotionMatrix([[1, 0], [0, 1]], [0.5, 0.5], 0.0, labels=("a",))
    em = EmotionMatrix([[1, 0], [0, 1]], [0.5, 0.5], 2.0)
    assert list(em.delta) == [2.0, 2.0]
    assert em.labels == ("group0", "group1")
    with pytest.raises(ValueError):
        em.A[0, 0] = 5.0


def test_multi_party_rates_at_one_half():
    em = EmotionMatrix([[3, -1, 2], [0, 4, -2], [1, 1, 1]], [0.2, 0.3, 0.5], [0.5, 1.0, 1.5])
    p01, p10 = multi_party_rates(MultiPartyState([0.5, 0.5, 0.5]), em)
    assert np.allclose(p01, logistic(-em.delta), atol=1e-15)
    assert np.allclose(p10, logistic(-em.delta), atol=1e-15)
    with pytest.raises(ParameterError):
        multi_party_rates(MultiPartyState([0.5, 0.5]), em)


def test_single_group_reduction():
    em = EmotionMatrix([[2.0]], [1.0], [0.0])
    p01, p10 = multi_party_rates(MultiPartyState([1.0]), em)
    assert p01[0] == pytest.approx(logistic(2.0))
    assert p10[0] == pytest.approx(logistic(-2.0))


def test_two_group_matrix_reproduces_the_two_party_rates():
    rng = np.random.default_rng(3)
    for _ in range(10_000):
        params = ModelParams(*rng.uniform(0, 10, size=3))
        r = rng.uniform(0.01, 0.99)
        theta = rng.uniform(size=2)
        em = EmotionMatrix.from_two_party(params, r)
        cfg = TwoPartyConfig(params, r)
        p01, p10 = multi_party_rates(MultiPartyState(theta), em)
        p_b01, p_b10, p_r01, p_r10 = two_party_rates(MeanFieldState(*theta), cfg)
        assert p01 == pytest.approx([p_b01, p_r01], abs=1e-12)
        assert p10 == pytest.approx([p_b10, p_r10], abs=1e-12)
        step_multi = theta + 0.01 * multi_party_derivative(MultiPartyState(theta), em)
        step_two = theta + 0.01 * np.array(two_party_derivative(MeanFieldState(*theta), cfg))
        assert np.max(np.abs(step_multi - step_two)) <= 1e-9


def test_two_group_integration_matches_two_party():
    params, r = ModelParams(6.0, 6.0, 4.0), 0.3
    two = integrate_two_party(TwoPartyConfig(params, r, DEF1, (0.8, 0.7), 0.01, 10.0))
    multi = integrate_multi_party(EmotionMatrix.from_two_party(params, r), [0.8, 0.7], 0.01, 10.0)
    _, blue, red = theta_arrays(two)
    theta = np.vstack([s.theta for s in multi])
    assert np.max(np.abs(theta[:, 0] - blue)) <= 1e-9
    assert np.max(np.abs(theta[:, 1] - red)) <= 1e-9


def test_multi_party_fixed_point_and_bounds():
    em = EmotionMatrix([[10, 0, -15], [2, 10, 2], [-15, 0, 10]], [0.2, 0.6, 0.2], 4.0)
    states = integrate_multi_party(em, [0.5, 0.5, 0.5], 0.01, 5.0)
    assert all(np.array_equal(s.theta, [0.5, 0.5, 0.5]) for s in states)
    states = integrate_multi_party(em, [0.9, 0.1, 0.6], 0.1, 20.0)
    theta = np.vstack([s.theta for s in states])
    assert theta.min() >= 0.0 and theta.max() <= 1.0
    with pytest.raises(ParameterError):
        integrate_multi_party(em, [0.5, 0.5], 0.01, 1.0)
    with pytest.raises(ParameterError):
        MultiPartyState([0.5, 1.5])


def test_multi_party_frame_layout():
    em = EmotionMatrix.from_two_party(MASKING, 0.18)
    states = integrate_multi_party(em, [0.9, 0.9], 0.01, 0.02)
    frame = multi_party_frame(states, em.labels)
    assert list(frame["group"]) == ["blue"] * 3 + ["red"] * 3
    assert frame["theta"].iloc[0] == 0.9
    with pytest.raises(ParameterError):
        multi_party_frame(states, ["only-one"])
    assert em.to_dict()["A"] == [[3.75, -0.25], [-0.25, 3.75]]
