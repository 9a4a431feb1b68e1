#!/usr/bin/env python3
"""
End-to-end checks: parameter recovery, mean-field fidelity, the calibrated
regimes and byte-identical reruns.

These are the slowest tests in the suite (a couple of minutes in total on
a laptop with several cores).
"""

from pathlib import Path

import numpy as np
import pytest

from affective_polarization.cli import main
from affective_polarization.config import load_config
from affective_polarization.core import InfluenceMeasureKind, ModelParams
from affective_polarization.estimation import fit_logistic, sample_from_law
from affective_polarization.experiments import (
    FIVE_GROUP_SIZES,
    USER_CALIBRATIONS,
    classify_multi_party,
    outgroup_sweep,
    run_figure_suite,
    run_roundtrip,
)
from affective_polarization.meanfield import (
    EmotionMatrix,
    MeanFieldState,
    MultiPartyState,
    TwoPartyConfig,
    integrate_multi_party,
    integrate_two_party,
    multi_party_derivative,
    theta_arrays,
    two_party_derivative,
)
from affective_polarization.network_sim import (
    InitialStanceSpec,
    SimConfig,
    complete_party_graph,
    ensemble_mean,
    ensemble_run,
)

MASKING = ModelParams(3.75, 0.25, 0.63)
DEF1 = InfluenceMeasureKind.DEGREE_NORMALIZED_COUNT
CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def test_panel_round_trip_recovers_masking_parameters():
    report = run_roundtrip(MASKING, n=2000, r=0.3, theta0=(0.9, 0.9), intervals=20, n_seeds=10, seed=0,
                           n_jobs=-1)
    assert len(report.records) == 10
    assert all(r.result.n_obs == 2000 * 20 for r in report.records)
    assert report.pass_count >= 8, report.to_dict()["seeds"]


@pytest.mark.parametrize("seed", range(10))
def test_direct_law_recovery(seed):
    result = fit_logistic(sample_from_law(MASKING, 100_000, seed=seed))
    assert result.converged
    assert all(z <= 3.0 for z in result.z_scores(MASKING))
    # beta is small next to its standard error at this size, so it only gets the SE check
    assert result.alpha_hat == pytest.approx(MASKING.alpha, rel=0.05)
    assert result.delta_hat == pytest.approx(MASKING.delta, rel=0.05)


def test_ensemble_mean_follows_the_mean_field():
    calibration = USER_CALIBRATIONS["masking"]["all-users"]
    graph = complete_party_graph(2000, calibration.r)
    config = SimConfig.for_time(calibration.params, DEF1, graph.n_nodes, t_end=20.0, snapshots_per_unit=10,
                                seed=11, init=InitialStanceSpec.bernoulli(0.9, 0.9))
    mean = ensemble_mean(ensemble_run(graph, config, replicates=50, n_jobs=-1))

    states = integrate_two_party(TwoPartyConfig(calibration.params, calibration.r, DEF1, (0.9, 0.9), 0.01, 20.0))
    t, blue, red = theta_arrays(states)
    sim_blue, sim_red = mean.sample_at(t)
    assert float(np.max(np.abs(sim_blue - blue))) < 0.05
    assert float(np.max(np.abs(sim_red - red))) < 0.05


def test_calibrated_all_users_runs_keep_blue_ahead():
    report = run_figure_suite("table1-trajectories")
    for name in ("masking-all-users", "lockdowns-all-users"):
        blue, red = report.record(name).theta_end
        assert blue - red > 0.1, name
    assert report.record("masking-partisans").gap > report.record("masking-all-users").gap


def test_outgroup_counterfactuals():
    calibration = USER_CALIBRATIONS["masking"]["all-users"]
    alpha, beta = calibration.params.alpha, calibration.params.beta
    report, _ = outgroup_sweep(calibration, [-alpha, 0.0, beta])

    no_hate = report.record("beta=0")
    assert no_hate.outcome != "crossover"
    assert no_hate.gap < report.record(f"beta={beta:g}").gap
    love = report.record(f"beta={-alpha:g}")
    assert (love.outcome, love.detail) == ("consensus", "pro")
    assert all(v == pytest.approx(0.5, abs=0.01) for v in report.record("alpha=0").theta_end)
    assert report.passed


def test_two_group_matrix_reduces_to_two_party_steps():
    rng = np.random.default_rng(20)
    worst = 0.0
    for _ in range(10_000):
        params = ModelParams(*rng.uniform(0.0, 10.0, size=3))
        r = rng.uniform(0.01, 0.99)
        theta = rng.uniform(size=2)
        em = EmotionMatrix.from_two_party(params, r)
        multi = theta + 0.01 * multi_party_derivative(MultiPartyState(theta), em)
        two = theta + 0.01 * np.array(two_party_derivative(MeanFieldState(*theta), TwoPartyConfig(params, r)))
        worst = max(worst, float(np.max(np.abs(multi - two))))
    assert worst <= 1e-9


def test_shipped_five_group_config_shows_a_horseshoe():
    config = load_config(CONFIG_DIR / "multiparty_horseshoe.json")
    assert tuple(config["sizes"]) == FIVE_GROUP_SIZES
    em = EmotionMatrix(config["emotion"], config["sizes"], config["inertia"], config["labels"])
    theta_end = integrate_multi_party(em, config["theta0"], config["epsilon"], config["t_end"])[-1].theta
    assert classify_multi_party(theta_end)[0] == "horseshoe"
    assert abs(theta_end[0] - theta_end[-1]) <= 0.1
    assert abs(theta_end[0] - theta_end[2]) > 0.5


@pytest.mark.parametrize("argv", [
    ["meanfield", "--t-end", "20"],
    ["multiparty", "--t-end", "20"],
    ["simulate", "--n", "200", "--t-end", "3", "--replicates", "3", "--seed", "4"],
    ["sweep", "--alphas", "2", "10", "--betas", "0.5", "--deltas", "3", "--rs", "0.3", "--t-end", "10"],
])
def test_every_csv_command_reruns_byte_identically(tmp_path, argv):
    first = tmp_path / "first.csv"
    assert main(["-q", *argv, "--output", str(first)]) == 0
    again = tmp_path / "again.csv"
    assert main(["-q", "rerun", str(first), "--output", str(again)]) == 0
    assert again.read_bytes() == first.read_bytes()
