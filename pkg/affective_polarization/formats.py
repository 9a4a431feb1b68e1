"""
Flat-file formats: graphs, stance panels, observation tables and run outputs.

Every CSV the toolkit writes starts with a metadata header of ``# key: value``
lines, followed by a pandas-written table with a fixed float format. Readers
skip the header, so any output can be fed back in as an input.
"""

import json
import logging
import math
import os
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple, Union

import numpy as np
import pandas as pd

from .core import InfluenceVector, PartyGraph
from .errors import GraphFormatError, MissingNodeError
from .estimation import OBSERVATION_COLUMNS, StancePanel, TransitionRecord, observation_frame

logger = logging.getLogger(__name__)

PathLike = Union[str, "os.PathLike[str]"]

TOOL_NAME = "affective-polarization"
FLOAT_FORMAT = "%.12g"
EDGE_COLUMNS = ("source", "target")
NODE_COLUMNS = ("node_id", "party")
METADATA_KEYS = ("tool", "version", "command", "config_hash", "seed", "measure", "rng", "config")


# -- metadata header -----------------------------------------------------------

def build_metadata(command: str, config_hash: str, config_json: str, seed: Optional[int] = None,
                   measure: Optional[str] = None, rng: Optional[str] = None,
                   **extra: Any) -> Dict[str, Any]:
    """Header fields in their canonical order; ``None`` values are omitted."""
    from . import __version__

    values = {
        "tool": TOOL_NAME,
        "version": __version__,
        "command": command,
        "config_hash": config_hash,
        "seed": seed,
        "measure": measure,
        "rng": rng,
        "config": config_json,
    }
    values.update(extra)
    return {key: value for key, value in values.items() if value is not None}


def _header_lines(metadata: Optional[Mapping[str, Any]]) -> str:
    if not metadata:
        return ""
    lines = []
    for key, value in metadata.items():
        text = str(value)
        if "\n" in text:
            raise ValueError(f"metadata value for {key!r} spans lines")
        lines.append(f"# {key}: {text}\n")
    return "".join(lines)


def _prepare(path: PathLike) -> Path:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_csv(frame: pd.DataFrame, path: PathLike, metadata: Optional[Mapping[str, Any]] = None) -> Path:
    """Write ``frame`` after the metadata header; returns the path written."""
    path = _prepare(path)
    body = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(_header_lines(metadata))
        handle.write(body)
    logger.info("wrote %d row(s) to %s", len(frame), path)
    return path


def _header_count(path: Path) -> int:
    count = 0
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            if not line.startswith("#"):
                break
            count += 1
    return count


def read_metadata(path: PathLike) -> Dict[str, str]:
    """Parse the leading ``# key: value`` lines of a toolkit file."""
    path = Path(path)
    if not path.exists():
        raise GraphFormatError("file not found", path=str(path))
    metadata: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for number, line in enumerate(handle, start=1):
            if not line.startswith("#"):
                break
            key, sep, value = line[1:].strip().partition(":")
            if not sep:
                raise GraphFormatError("metadata lines must read '# key: value'", path=str(path), line=number)
            metadata[key.strip()] = value.strip()
    return metadata


def _json_default(value: Any):
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _clean_floats(value: Any):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _clean_floats(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean_floats(v) for v in value]
    return value


def write_json(payload: Mapping[str, Any], path: PathLike) -> Path:
    """Pretty JSON with sorted keys; non-finite floats become null."""
    path = _prepare(path)
    cleaned = _clean_floats(json.loads(json.dumps(payload, default=_json_default)))
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(json.dumps(cleaned, indent=2, sort_keys=True))
        handle.write("\n")
    logger.info("wrote %s", path)
    return path


# -- raw table reading ---------------------------------------------------------

def _read_table(path: PathLike, columns: Tuple[str, ...], optional: Tuple[str, ...] = ()) -> Tuple[pd.DataFrame, int]:
    """
    Read a headerless-or-headed CSV of strings.

    Returns:
        (frame, first_line) where ``first_line`` is the 1-based file line of
        the frame's first data row
    """
    path = Path(path)
    if not path.exists():
        raise GraphFormatError("file not found", path=str(path))
    skipped = _header_count(path)
    try:
        raw = pd.read_csv(path, header=None, dtype=str, skiprows=skipped, skipinitialspace=True,
                          keep_default_na=False)
    except pd.errors.EmptyDataError:
        return pd.DataFrame(columns=list(columns)), skipped + 1
    except pd.errors.ParserError as exc:
        raise GraphFormatError(f"malformed CSV: {exc}", path=str(path)) from None

    first_line = skipped + 1
    if len(raw) and raw.iloc[0, 0].strip() == columns[0]:
        header = [str(c).strip() for c in raw.iloc[0]]
        raw = raw.iloc[1:].reset_index(drop=True)
        raw.columns = header
        first_line += 1
        missing = [c for c in columns if c not in header]
        if missing:
            raise GraphFormatError(f"missing column(s) {', '.join(missing)}", path=str(path), line=first_line - 1)
        unknown = [c for c in header if c not in columns + optional]
        if unknown:
            raise GraphFormatError(f"unexpected column(s) {', '.join(unknown)}", path=str(path), line=first_line - 1)
    else:
        width = raw.shape[1]
        allowed = columns + optional
        if width < len(columns) or width > len(allowed):
            raise GraphFormatError(f"expected {len(columns)} columns ({', '.join(columns)}), got {width}",
                                   path=str(path), line=first_line)
        raw.columns = list(allowed[:width])
    return raw, first_line


def _binary_column(frame: pd.DataFrame, column: str, path: PathLike, first_line: int) -> List[int]:
    values = []
    for offset, text in enumerate(frame[column].tolist()):
        text = text.strip()
        if text not in ("0", "1"):
            raise GraphFormatError(f"{column} must be 0 or 1, got {text!r}", path=str(path),
                                   line=first_line + offset, column=column)
        values.append(int(text))
    return values


# -- graphs --------------------------------------------------------------------

def load_graph(edge_path: PathLike, attr_path: PathLike) -> PartyGraph:
    """
    Build a PartyGraph from an edge list and a node-attribute file.

    The attribute file lists ``node_id,party`` (optionally ``stance``) and
    fixes the node order. Duplicate edges are dropped with a warning.

    Raises:
        GraphFormatError: Unparseable row, non-binary party or self-loop,
            with file and line
        MissingNodeError: An edge endpoint has no attribute row
    """
    attrs, attr_first = _read_table(attr_path, NODE_COLUMNS, optional=("stance",))
    node_ids = [text.strip() for text in attrs["node_id"].tolist()]
    party = _binary_column(attrs, "party", attr_path, attr_first)
    seen = set()
    for offset, node_id in enumerate(node_ids):
        if not node_id:
            raise GraphFormatError("empty node id", path=str(attr_path), line=attr_first + offset, column="node_id")
        if node_id in seen:
            raise GraphFormatError(f"duplicate node id {node_id!r}", path=str(attr_path),
                                   line=attr_first + offset, column="node_id")
        seen.add(node_id)
    stances = None
    if "stance" in attrs.columns:
        stances = dict(zip(node_ids, _binary_column(attrs, "stance", attr_path, attr_first)))

    edges_frame, edge_first = _read_table(edge_path, EDGE_COLUMNS)
    edges = []
    for offset, (u, v) in enumerate(zip(edges_frame["source"].tolist(), edges_frame["target"].tolist())):
        u, v = u.strip(), v.strip()
        line = edge_first + offset
        for node_id, column in ((u, "source"), (v, "target")):
            if node_id not in seen:
                raise MissingNodeError(node_id, f"node {node_id!r} has no attribute row",
                                       path=str(edge_path), line=line, column=column)
        if u == v:
            raise GraphFormatError(f"self-loop on node {u!r}", path=str(edge_path), line=line)
        edges.append((u, v))

    graph = PartyGraph.from_edges(dict(zip(node_ids, party)), edges, stances)
    logger.info("loaded graph with %d nodes and %d edges from %s", graph.n_nodes, graph.n_edges, edge_path)
    return graph


def graph_frames(graph: PartyGraph) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """(edges, attributes) tables for ``graph``."""
    edges = pd.DataFrame(list(graph.edges()), columns=list(EDGE_COLUMNS))
    attrs = pd.DataFrame({"node_id": graph.node_ids, "party": graph.party.astype(int)})
    if graph.stances_initialized:
        attrs["stance"] = graph.stance.astype(int)
    return edges, attrs


def save_graph(graph: PartyGraph, edge_path: PathLike, attr_path: PathLike,
               metadata: Optional[Mapping[str, Any]] = None) -> Tuple[Path, Path]:
    edges, attrs = graph_frames(graph)
    return write_csv(edges, edge_path, metadata), write_csv(attrs, attr_path, metadata)


# -- panels and observations ---------------------------------------------------

def load_panel(path: PathLike, interval_days: Optional[float] = None) -> StancePanel:
    """
    Read a ``node_id,interval,party,stance`` panel.

    ``interval_days`` defaults to the value recorded in the file header.
    """
    metadata = read_metadata(path)
    frame, first_line = _read_table(path, StancePanel.COLUMNS)
    if interval_days is None and "interval_days" in metadata:
        interval_days = float(metadata["interval_days"])
    frame["node_id"] = frame["node_id"].str.strip()
    return StancePanel(frame, interval_days=interval_days, source=str(path), line_offset=first_line - 2)


def save_panel(panel: StancePanel, path: PathLike, metadata: Optional[Mapping[str, Any]] = None) -> Path:
    header = dict(metadata or {})
    if panel.interval_days is not None:
        header["interval_days"] = panel.interval_days
    return write_csv(panel.frame, path, header)


def save_observations(observations: Union[pd.DataFrame, Iterable[TransitionRecord]], path: PathLike,
                      metadata: Optional[Mapping[str, Any]] = None) -> Path:
    frame = observations if isinstance(observations, pd.DataFrame) else observation_frame(observations)
    return write_csv(frame.loc[:, list(OBSERVATION_COLUMNS)], path, metadata)


def load_observations(path: PathLike) -> List[TransitionRecord]:
    """
    Read a Case-1 observation table into TransitionRecords.

    An empty file yields an empty list; the estimator reports the shortfall.
    """
    frame, first_line = _read_table(path, OBSERVATION_COLUMNS)
    records = []
    for offset, row in enumerate(frame.itertuples(index=False)):
        line = first_line + offset
        try:
            stance_t = int(row.stance_t)
            stance_t1 = int(row.stance_t1)
            d_in_1 = float(row.d_in_1)
            d_out_1 = float(row.d_out_1)
            time_index = int(row.time_index) if str(row.time_index).strip() else None
        except ValueError as exc:
            raise GraphFormatError(f"unparseable value: {exc}", path=str(path), line=line) from None
        if stance_t not in (0, 1) or stance_t1 not in (0, 1):
            raise GraphFormatError("stances must be 0 or 1", path=str(path), line=line)
        if not (math.isfinite(d_in_1) and math.isfinite(d_out_1)):
            raise GraphFormatError("influence values must be finite", path=str(path), line=line)
        influence = InfluenceVector.from_stance_one(d_in_1, d_out_1)
        records.append(TransitionRecord(stance_t, stance_t1, influence, str(row.node_id).strip(), time_index))
    logger.info("loaded %d observation(s) from %s", len(records), path)
    return records
