#!/usr/bin/env python3
"""
Tests for the flat-file formats and metadata headers.
"""

import json
import math

import numpy as np
import pandas as pd
import pytest

from affective_polarization import __version__
from affective_polarization.core import InfluenceVector
from affective_polarization.errors import GraphFormatError, MissingNodeError
from affective_polarization.estimation import OBSERVATION_COLUMNS, StancePanel, TransitionRecord, observation_frame
from affective_polarization.formats import (
    build_metadata,
    load_graph,
    load_observations,
    load_panel,
    read_metadata,
    save_graph,
    save_observations,
    save_panel,
    write_csv,
    write_json,
)
from affective_polarization.network_sim import two_block_graph


def _files(tmp_path, edges, nodes):
    edge_path = tmp_path / "edges.csv"
    node_path = tmp_path / "nodes.csv"
    edge_path.write_text(edges, encoding="utf-8")
    node_path.write_text(nodes, encoding="utf-8")
    return edge_path, node_path


def test_load_small_path(tmp_path):
    graph = load_graph(*_files(tmp_path, "a,b\nb,c\n", "a,0\nb,0\nc,1\n"))
    assert graph.node_ids == ["a", "b", "c"]
    assert list(graph.party) == [0, 0, 1]
    assert list(graph.edges()) == [("a", "b"), ("b", "c")]
    assert not graph.stances_initialized


def test_load_with_headers_and_stances(tmp_path):
    graph = load_graph(*_files(tmp_path, "source,target\na,b\n", "node_id,party,stance\na,0,1\nb,1,0\n"))
    assert graph.stances() == {"a": 1, "b": 0}


def test_hash_in_node_ids_is_kept(tmp_path):
    edge_path, node_path = _files(tmp_path, "a#1,b\n", "a#1,0\nb,1\n")
    edge_path.write_text("# tool: x\n# command: synth\nsource,target\na#1,b\n", encoding="utf-8")
    graph = load_graph(edge_path, node_path)
    assert graph.node_ids == ["a#1", "b"]
    assert list(graph.edges()) == [("a#1", "b")]


def test_self_loop_names_line(tmp_path):
    with pytest.raises(GraphFormatError) as exc:
        load_graph(*_files(tmp_path, "a,a\n", "a,0\n"))
    assert exc.value.line == 1
    assert "self-loop" in str(exc.value)


def test_missing_attribute_names_node_and_line(tmp_path):
    with pytest.raises(MissingNodeError) as exc:
        load_graph(*_files(tmp_path, "a,b\nb,z\n", "a,0\nb,1\n"))
    assert exc.value.node_id == "z"
    assert exc.value.line == 2
    assert exc.value.column == "target"


def test_non_binary_party(tmp_path):
    with pytest.raises(GraphFormatError) as exc:
        load_graph(*_files(tmp_path, "a,b\n", "node_id,party\na,0\nb,2\n"))
    assert exc.value.line == 3
    assert exc.value.column == "party"


def test_duplicate_node_and_bad_width(tmp_path):
    with pytest.raises(GraphFormatError, match="duplicate node id"):
        load_graph(*_files(tmp_path, "a,b\n", "a,0\na,1\nb,1\n"))
    with pytest.raises(GraphFormatError, match="expected 2 columns"):
        load_graph(*_files(tmp_path, "a\n", "a,0\n"))
    with pytest.raises(GraphFormatError, match="file not found"):
        load_graph(tmp_path / "nope.csv", tmp_path / "nodes.csv")


def test_duplicate_edges_are_counted(tmp_path):
    graph = load_graph(*_files(tmp_path, "a,b\nb,a\na,b\n", "a,0\nb,1\n"))
    assert graph.n_edges == 1
    assert graph.duplicate_edges == 2


def test_large_graph_round_trip(tmp_path):
    original = two_block_graph(10_000, 0.5, 0.001, 0.0002, seed=3)
    save_graph(original, tmp_path / "e1.csv", tmp_path / "n1.csv")
    first = load_graph(tmp_path / "e1.csv", tmp_path / "n1.csv")
    save_graph(first, tmp_path / "e2.csv", tmp_path / "n2.csv")
    second = load_graph(tmp_path / "e2.csv", tmp_path / "n2.csv")
    assert first == second
    assert first.n_nodes == original.n_nodes
    assert first.n_edges == original.n_edges
    assert (tmp_path / "e1.csv").read_bytes() == (tmp_path / "e2.csv").read_bytes()


def test_panel_round_trip_keeps_interval_days(tmp_path):
    panel = StancePanel.from_rows([("u1", 0, 0, 1), ("u2", 0, 1, 0), ("u1", 1, 0, 0)], interval_days=15)
    save_panel(panel, tmp_path / "panel.csv", {"command": "synth"})
    back = load_panel(tmp_path / "panel.csv")
    assert back == panel
    assert back.interval_days == 15.0
    assert read_metadata(tmp_path / "panel.csv")["command"] == "synth"


def test_panel_errors_report_file_lines(tmp_path):
    path = tmp_path / "panel.csv"
    path.write_text("# tool: x\nnode_id,interval,party,stance\nu1,0,0,1\nu1,0,0,0\n", encoding="utf-8")
    with pytest.raises(GraphFormatError) as exc:
        load_panel(path)
    assert exc.value.line == 4


def test_observations_round_trip(tmp_path):
    records = [
        TransitionRecord(0, 1, InfluenceVector.from_stance_one(0.25, -0.5), "u1", 0),
        TransitionRecord(1, 1, InfluenceVector.from_stance_one(-0.125, 0.75), "u2", 3),
    ]
    save_observations(records, tmp_path / "obs.csv")
    back = load_observations(tmp_path / "obs.csv")
    assert back == records


def test_observation_frame_marks_unknown_party(tmp_path):
    records = [
        TransitionRecord(0, 1, InfluenceVector.from_stance_one(0.25, -0.5), "u1", 0),
        TransitionRecord(1, 0, InfluenceVector.from_stance_one(-0.125, 0.75), "u2", 0),
    ]
    frame = observation_frame(records, {"u1": 1})
    assert list(frame.columns) == list(OBSERVATION_COLUMNS)
    assert frame["party"].tolist() == [1, -1]
    save_observations(frame, tmp_path / "obs.csv")
    assert load_observations(tmp_path / "obs.csv") == records


def test_empty_observation_file_loads_empty(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("", encoding="utf-8")
    assert load_observations(path) == []


def test_observation_errors(tmp_path):
    path = tmp_path / "obs.csv"
    path.write_text("u1,0,0,0,2,0.1,0.2\n", encoding="utf-8")
    with pytest.raises(GraphFormatError, match="line 1"):
        load_observations(path)
    path.write_text("u1,0,0,0,1,abc,0.2\n", encoding="utf-8")
    with pytest.raises(GraphFormatError, match="unparseable"):
        load_observations(path)


def test_metadata_header_order_and_parse(tmp_path):
    metadata = build_metadata("meanfield", "0123456789abcdef", '{"alpha":3.75}', seed=None,
                              measure="definition1", artifact="out.csv")
    assert list(metadata) == ["tool", "version", "command", "config_hash", "measure", "config", "artifact"]
    assert metadata["version"] == __version__

    path = write_csv(pd.DataFrame({"t": [0.0, 0.1]}), tmp_path / "out.csv", metadata)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "# tool: affective-polarization"
    assert lines[-3:] == ["t", "0", "0.1"]
    assert read_metadata(path)["config"] == '{"alpha":3.75}'


def test_bad_metadata_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("# nonsense\nt\n0\n", encoding="utf-8")
    with pytest.raises(GraphFormatError) as exc:
        read_metadata(path)
    assert exc.value.line == 1


def test_write_json_replaces_non_finite(tmp_path):
    path = write_json({"b": math.nan, "a": np.float64(1.5), "n": np.int64(3)}, tmp_path / "x.json")
    assert json.loads(path.read_text(encoding="utf-8")) == {"a": 1.5, "b": None, "n": 3}
    assert path.read_text(encoding="utf-8").index('"a"') < path.read_text(encoding="utf-8").index('"b"')
