#!/usr/bin/env python3
"""
Tests for the core model: party graphs, influence measures and the
switching kernel.
"""

import itertools
import math
import warnings

import networkx as nx
import numpy as np
import pytest

from affective_polarization.core import (
    BLUE,
    RED,
    InfluenceMeasureKind,
    InfluenceVector,
    ModelParams,
    PartyGraph,
    influence,
    influence_arrays,
    influence_def1,
    influence_def2,
    influence_messages,
    logistic,
    switch_logit,
    transition_probability,
)
from affective_polarization.errors import ConfigError, GraphFormatError, MissingNodeError, ParameterError

from conftest import star_graph


def random_party_graph(n, p, seed):
    rng = np.random.default_rng(seed)
    g = nx.gnp_random_graph(n, p, seed=seed)
    parties = {v: int(rng.integers(2)) for v in g.nodes}
    stances = {v: int(rng.integers(2)) for v in g.nodes}
    return PartyGraph.from_edges(parties, g.edges(), stances)


# -- influence measures ------------------------------------------------------

def test_definition1_worked_example():
    """70 of 100 in-group and 7 of 10 out-group neighbours hold stance 1."""
    graph = star_graph((70, 30), (7, 3))
    inf = influence_def1(graph, "v")
    assert inf.d_in_1 == pytest.approx(40 / 110, abs=1e-15)
    assert inf.d_out_1 == pytest.approx(4 / 110, abs=1e-15)
    assert inf.d_in_0 == -inf.d_in_1
    assert inf.d_out_0 == -inf.d_out_1


def test_definition1_unanimous_in_group():
    graph = star_graph((5, 0), (0, 0))
    inf = influence_def1(graph, "v")
    assert inf.d_in_1 == 1.0
    assert inf.d_out_1 == 0.0


def test_definition1_path_graph(path_graph):
    inf = influence_def1(path_graph, "b")
    assert inf.d_in_1 == pytest.approx(0.5)
    assert inf.d_out_1 == pytest.approx(-0.5)


def test_definition2_worked_example():
    graph = star_graph((70, 30), (7, 3))
    inf = influence_def2(graph, "v")
    assert inf.d_in_1 == pytest.approx(0.4)
    assert inf.d_out_1 == pytest.approx(0.4)
    assert inf.d_in_0 == pytest.approx(-0.4)


def test_definition2_small_neighbourhoods():
    assert influence_def2(star_graph((3, 3), (1, 0)), "v").d_in_1 == 0.0
    inf = influence_def2(star_graph((2, 1), (0, 1)), "v")
    assert inf.d_in_1 == pytest.approx(1 / 3)
    assert inf.d_out_1 == -1.0


def test_isolated_node_and_empty_groups_give_zero():
    graph = PartyGraph.from_edges({"x": BLUE, "y": RED}, [], {"x": 1, "y": 0})
    assert influence_def1(graph, "x") == InfluenceVector.zero()
    assert influence_def2(graph, "x") == InfluenceVector.zero()
    only_in = star_graph((2, 0), (0, 0))
    assert influence_def2(only_in, "v").d_out_1 == 0.0


def test_red_centre_sees_red_as_in_group():
    graph = star_graph((1, 0), (0, 3), center_party=RED)
    inf = influence_def1(graph, "v")
    assert inf.d_in_1 == pytest.approx(0.25)
    assert inf.d_out_1 == pytest.approx(-0.75)


def test_message_counts_follow_total_normalization():
    inf = influence_messages((70, 30), (7, 3))
    assert inf.d_in_1 == pytest.approx(40 / 110)
    assert inf.d_out_1 == pytest.approx(4 / 110)
    assert influence_messages((4, 4), (9, 9)) == InfluenceVector.from_stance_one(0.0, 0.0)
    inf = influence_messages((5, 0), (0, 5))
    assert (inf.d_in_1, inf.d_out_1) == (0.5, -0.5)
    assert influence_messages((0, 0), (0, 0)) == InfluenceVector.zero()


def test_message_counts_group_normalization():
    inf = influence_messages((70, 30), (7, 3), normalization="group")
    assert inf.d_in_1 == pytest.approx(0.4)
    assert inf.d_out_1 == pytest.approx(0.4)


def test_message_counts_reject_bad_input():
    with pytest.raises(ParameterError):
        influence_messages((-1, 0), (0, 0))
    with pytest.raises(ConfigError):
        influence_messages((1, 0), (0, 0), normalization="in-group")


def test_dispatch_by_kind(path_graph):
    assert influence(path_graph, "b", "definition1") == influence_def1(path_graph, "b")
    assert influence(path_graph, "c", InfluenceMeasureKind.GROUP_FRACTION) == influence_def2(path_graph, "c")
    with pytest.raises(ConfigError):
        influence(path_graph, "b", InfluenceMeasureKind.MESSAGE_COUNT)


@pytest.mark.parametrize("seed", range(5))
def test_antisymmetry_and_definition1_bound(seed):
    graph = random_party_graph(40, 0.15, seed)
    for node in graph.node_ids:
        inf1 = influence_def1(graph, node)
        inf2 = influence_def2(graph, node)
        for inf in (inf1, inf2):
            assert inf.d_in_0 == -inf.d_in_1
            assert inf.d_out_0 == -inf.d_out_1
        assert abs(inf1.d_in_1) + abs(inf1.d_out_1) <= 1.0 + 1e-15
        assert -1.0 <= inf2.d_in_1 <= 1.0
        assert -1.0 <= inf2.d_out_1 <= 1.0


@pytest.mark.parametrize("seed", range(10))
def test_matches_brute_force_enumeration(seed):
    graph = random_party_graph(8, 0.4, seed + 100)
    nxg = graph.to_networkx()
    for node in graph.node_ids:
        own = nxg.nodes[node]["party"]
        m = {(g, s): 0 for g in (0, 1) for s in (0, 1)}
        for nbr in nxg.neighbors(node):
            group = 0 if nxg.nodes[nbr]["party"] == own else 1
            m[(group, nxg.nodes[nbr]["stance"])] += 1
        degree = sum(m.values())
        expected1 = ((m[0, 1] - m[0, 0]) / degree, (m[1, 1] - m[1, 0]) / degree) if degree else (0.0, 0.0)
        n_in, n_out = m[0, 1] + m[0, 0], m[1, 1] + m[1, 0]
        expected2 = ((m[0, 1] - m[0, 0]) / n_in if n_in else 0.0,
                     (m[1, 1] - m[1, 0]) / n_out if n_out else 0.0)
        inf1 = influence_def1(graph, node)
        inf2 = influence_def2(graph, node)
        assert (inf1.d_in_1, inf1.d_out_1) == expected1
        assert (inf2.d_in_1, inf2.d_out_1) == expected2


def test_vectorized_influence_matches_per_node():
    graph = random_party_graph(30, 0.2, 7)
    counts = graph.all_neighbor_counts()
    for kind, single in ((InfluenceMeasureKind.DEGREE_NORMALIZED_COUNT, influence_def1),
                         (InfluenceMeasureKind.GROUP_FRACTION, influence_def2)):
        d_in, d_out = influence_arrays(counts, graph.party.astype(np.intp), kind)
        for i, node in enumerate(graph.node_ids):
            inf = single(graph, node)
            assert d_in[i] == pytest.approx(inf.d_in_1, abs=1e-15)
            assert d_out[i] == pytest.approx(inf.d_out_1, abs=1e-15)


# -- switching kernel --------------------------------------------------------

def test_transition_probability_examples():
    zero = InfluenceVector.zero()
    assert transition_probability(ModelParams(0, 0, 0), InfluenceVector.from_stance_one(0.3, -0.2), 1) == 0.5
    assert transition_probability(ModelParams(3.75, 0.25, 0.63), zero, 0) == pytest.approx(
        1 / (1 + math.exp(0.63)), abs=1e-12)
    inf = InfluenceVector.from_stance_one(0.4, 0.4)
    assert transition_probability(ModelParams(1, 1, 0), inf, 0) == pytest.approx(0.5)


def test_logit_is_linear_in_influence():
    rng = np.random.default_rng(1)
    for _ in range(1000):
        params = ModelParams(*rng.uniform(0, 5, size=3))
        d_in, d_out = rng.uniform(-1, 1, size=2)
        inf = InfluenceVector.from_stance_one(d_in, d_out)
        for stance in (0, 1):
            p = transition_probability(params, inf, stance)
            x_in, x_out = inf.toward(1 - stance)
            linear = params.alpha * x_in - params.beta * x_out - params.delta
            assert 0.0 < p < 1.0
            assert math.log(p / (1 - p)) == pytest.approx(linear, abs=1e-12)
            assert switch_logit(params, inf, stance) == linear


@pytest.mark.parametrize("seed", range(3))
def test_stance_relabel_symmetry(seed):
    graph = random_party_graph(20, 0.3, seed)
    flipped = graph.copy()
    flipped.set_stances(1 - graph.stance)
    params = ModelParams(2.0, 0.7, 0.4)
    for node in graph.node_ids:
        inf = influence_def1(graph, node)
        mirror = influence_def1(flipped, node)
        assert mirror.d_in_1 == -inf.d_in_1
        assert mirror == inf.relabeled()
        assert transition_probability(params, inf, 0) == pytest.approx(transition_probability(params, mirror, 1))
        assert transition_probability(params, inf, 1) == pytest.approx(transition_probability(params, mirror, 0))


def test_logistic_is_stable_for_large_arguments():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert logistic(800.0) == 1.0
        assert logistic(-800.0) == 0.0
        assert np.all(np.isfinite(logistic(np.array([-1000.0, 0.0, 1000.0]))))
    assert logistic(0) == 0.5


def test_stance_must_be_binary():
    with pytest.raises(ParameterError):
        transition_probability(ModelParams(1, 1, 1), InfluenceVector.zero(), 2)


# -- parameters ----------------------------------------------------------------

def test_model_params_validation():
    with pytest.raises(ParameterError):
        ModelParams(-1.0, 0.0, 0.0)
    with pytest.raises(ParameterError):
        ModelParams(1.0, 0.0, -0.1)
    with pytest.raises(ParameterError):
        ModelParams(1.0, -0.5, 0.0)
    with pytest.raises(ParameterError):
        ModelParams(float("nan"), 0.0, 0.0)
    love = ModelParams(1.0, -1.0, 0.0, allow_negative_beta=True)
    assert love.beta == -1.0
    assert ModelParams(1, 2, 3).to_dict() == {"alpha": 1.0, "beta": 2.0, "delta": 3.0}


def test_influence_vector_rejects_asymmetry():
    with pytest.raises(ParameterError):
        InfluenceVector(0.5, -0.4, 0.0, 0.0)


@pytest.mark.parametrize("text,kind", [
    ("definition1", InfluenceMeasureKind.DEGREE_NORMALIZED_COUNT),
    ("def2", InfluenceMeasureKind.GROUP_FRACTION),
    ("Messages", InfluenceMeasureKind.MESSAGE_COUNT),
    ("degree-normalized-count", InfluenceMeasureKind.DEGREE_NORMALIZED_COUNT),
])
def test_measure_parsing(text, kind):
    assert InfluenceMeasureKind.parse(text) is kind


def test_unknown_measure():
    with pytest.raises(ConfigError):
        InfluenceMeasureKind.parse("definition3")


# -- graphs --------------------------------------------------------------------

def test_graph_rejects_self_loops_and_unknown_nodes():
    with pytest.raises(GraphFormatError):
        PartyGraph.from_edges({"a": 0, "b": 1}, [("a", "a")])
    with pytest.raises(MissingNodeError):
        PartyGraph.from_edges({"a": 0}, [("a", "z")])
    with pytest.raises(GraphFormatError):
        PartyGraph.from_edges({"a": 2}, [])


def test_duplicate_edges_are_dropped():
    graph = PartyGraph.from_edges({"a": 0, "b": 1}, [("a", "b"), ("b", "a"), ("a", "b")])
    assert graph.n_edges == 1
    assert graph.duplicate_edges == 2


def test_networkx_round_trip(path_graph):
    back = PartyGraph.from_networkx(path_graph.to_networkx())
    assert back == path_graph
    assert list(back.edges()) == [("a", "b"), ("b", "c"), ("c", "d")]


def test_copy_shares_structure_not_stances(path_graph):
    clone = path_graph.copy()
    clone.set_stance("a", 0)
    assert path_graph.get_stance("a") == 1
    assert clone.adjacency is path_graph.adjacency


def test_complete_graph_counts():
    graph = PartyGraph.complete([0, 0, 0, 1, 1])
    assert graph.n_edges == 10
    assert graph.group_sizes == (3, 2)
    graph.set_stances([1, 0, 0, 1, 1])
    assert graph.theta() == (pytest.approx(1 / 3), 1.0)
    counts = graph.all_neighbor_counts()
    for i in range(graph.n_nodes):
        assert np.array_equal(counts[i], graph.neighbor_counts(i))


def test_unset_stances_are_reported(path_graph):
    graph = PartyGraph.from_edges({"a": 0, "b": 1}, [("a", "b")])
    assert not graph.stances_initialized
    with pytest.raises(MissingNodeError):
        influence_def1(graph, "a")
    with pytest.raises(MissingNodeError):
        PartyGraph.from_edges({"a": 0, "b": 1}, [("a", "b")], {"a": 1})


def test_party_labels_are_read_only(path_graph):
    with pytest.raises(ValueError):
        path_graph.party[0] = 1
