"""
Core model: party-labelled graphs, influence measures and the switching kernel.

A node holds a static party label (0 = blue, 1 = red) and a binary stance.
When sampled it switches stance with probability

    sigma(alpha * d_in - beta * d_out - delta)

where (d_in, d_out) is the prevalence of the *opposite* stance among its
in-group and out-group neighbours, as quantified by one of the influence
measures below.

Features:
- :class:`PartyGraph` backed by a scipy CSR adjacency, convertible to and
  from networkx
- Definition 1 (degree-normalized net counts), Definition 2 (per-group net
  fractions) and the message-count exposure variant
- Numerically stable logistic evaluation
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Hashable, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy import sparse
from scipy.special import expit

from .errors import ConfigError, GraphFormatError, MissingNodeError, ParameterError

logger = logging.getLogger(__name__)

BLUE = 0
RED = 1
PARTY_NAMES = {BLUE: "blue", RED: "red"}
UNSET = -1


class InfluenceMeasureKind(str, Enum):
    """Which rule turns a neighbourhood into an :class:`InfluenceVector`."""

    DEGREE_NORMALIZED_COUNT = "definition1"
    GROUP_FRACTION = "definition2"
    MESSAGE_COUNT = "messages"

    @classmethod
    def parse(cls, value: Any) -> "InfluenceMeasureKind":
        """Accept an enum member, its value, its name or a short alias."""
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {
            "definition1": cls.DEGREE_NORMALIZED_COUNT,
            "def1": cls.DEGREE_NORMALIZED_COUNT,
            "degree_normalized_count": cls.DEGREE_NORMALIZED_COUNT,
            "definition2": cls.GROUP_FRACTION,
            "def2": cls.GROUP_FRACTION,
            "group_fraction": cls.GROUP_FRACTION,
            "messages": cls.MESSAGE_COUNT,
            "message_count": cls.MESSAGE_COUNT,
            "tweets": cls.MESSAGE_COUNT,
        }
        try:
            return aliases[key]
        except KeyError:
            valid = ", ".join(kind.value for kind in cls)
            raise ConfigError(f"unknown influence measure {value!r}; expected one of {valid}")

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class InfluenceVector:
    """
    Prevalence of each stance among a node's in-group and out-group.

    The stance-0 components are always the exact negation of the stance-1
    components; build instances with :meth:`from_stance_one`.
    """

    d_in_1: float
    d_in_0: float
    d_out_1: float
    d_out_0: float

    def __post_init__(self):
        if self.d_in_0 != -self.d_in_1 or self.d_out_0 != -self.d_out_1:
            raise ParameterError(
                f"influence vector is not antisymmetric: {self.d_in_1}/{self.d_in_0}, "
                f"{self.d_out_1}/{self.d_out_0}"
            )

    @classmethod
    def from_stance_one(cls, d_in_1: float, d_out_1: float) -> "InfluenceVector":
        d_in_1 = float(d_in_1)
        d_out_1 = float(d_out_1)
        return cls(d_in_1, -d_in_1, d_out_1, -d_out_1)

    @classmethod
    def zero(cls) -> "InfluenceVector":
        return cls(0.0, -0.0, 0.0, -0.0)

    def toward(self, stance: int) -> Tuple[float, float]:
        """(x_in, x_out) pulling a node toward ``stance``."""
        if stance == 1:
            return self.d_in_1, self.d_out_1
        if stance == 0:
            return self.d_in_0, self.d_out_0
        raise ParameterError(f"stance must be 0 or 1, got {stance!r}")

    def relabeled(self) -> "InfluenceVector":
        """The vector seen after swapping every stance 0 <-> 1."""
        return InfluenceVector(self.d_in_0, self.d_in_1, self.d_out_0, self.d_out_1)


@dataclass(frozen=True)
class ModelParams:
    """
    Affective polarization parameters.

    Args:
        alpha: In-group love, >= 0
        beta: Out-group hate; negative (out-group love) only when
              ``allow_negative_beta`` is set
        delta: Inertia, >= 0
        allow_negative_beta: Enables the counterfactual out-group-love mode
    """

    alpha: float
    beta: float
    delta: float
    allow_negative_beta: bool = field(default=False, compare=False)

    def __post_init__(self):
        for name in ("alpha", "beta", "delta"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float, np.floating, np.integer)):
                raise ParameterError(f"{name} must be a number, got {value!r}")
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.alpha < 0:
            raise ParameterError(f"alpha must be >= 0, got {self.alpha}")
        if self.delta < 0:
            raise ParameterError(f"delta must be >= 0, got {self.delta}")
        if self.beta < 0 and not self.allow_negative_beta:
            raise ParameterError(
                f"beta must be >= 0, got {self.beta}; negative beta (out-group love) "
                "requires allow_negative_beta"
            )

    def logit(self, x_in, x_out):
        """Linear predictor alpha*x_in - beta*x_out - delta (scalar or array)."""
        return self.alpha * x_in - self.beta * x_out - self.delta

    def replace(self, **changes) -> "ModelParams":
        values = {"alpha": self.alpha, "beta": self.beta, "delta": self.delta,
                  "allow_negative_beta": self.allow_negative_beta}
        values.update(changes)
        return ModelParams(**values)

    def to_dict(self) -> Dict[str, float]:
        return {"alpha": self.alpha, "beta": self.beta, "delta": self.delta}


def logistic(x):
    """Standard logistic function, overflow-free for any finite input."""
    if np.ndim(x) == 0:
        x = float(x)
        if x >= 0:
            return 1.0 / (1.0 + math.exp(-x))
        z = math.exp(x)
        return z / (1.0 + z)
    return expit(np.asarray(x, dtype=float))


def _check_stance(stance: Any) -> int:
    if stance not in (0, 1) or isinstance(stance, bool):
        raise ParameterError(f"stance must be 0 or 1, got {stance!r}")
    return int(stance)


def switch_logit(params: ModelParams, inf: InfluenceVector, current_stance: int) -> float:
    """Log-odds that a node holding ``current_stance`` switches."""
    target = 1 - _check_stance(current_stance)
    return params.logit(*inf.toward(target))


def transition_probability(params: ModelParams, inf: InfluenceVector, current_stance: int) -> float:
    """Probability that a sampled node holding ``current_stance`` switches."""
    return logistic(switch_logit(params, inf, current_stance))


class PartyGraph:
    """
    Undirected simple graph with immutable party labels and mutable stances.

    Nodes are addressed by their opaque ids in the public API and by their
    position (0..n-1, construction order) internally. The adjacency is a
    symmetric CSR matrix shared between copies; only the stance array is
    per-copy state.
    """

    def __init__(self, node_ids: Sequence[Hashable], party: Sequence[int],
                 adjacency: sparse.csr_matrix, stance: Optional[Sequence[int]] = None,
                 duplicate_edges: int = 0):
        self._node_ids = list(node_ids)
        self._index = {node_id: i for i, node_id in enumerate(self._node_ids)}
        if len(self._index) != len(self._node_ids):
            raise GraphFormatError("node ids must be unique")

        party = np.asarray(party, dtype=np.int8)
        if party.shape != (len(self._node_ids),):
            raise GraphFormatError("party array length does not match node count")
        if party.size and not np.isin(party, (BLUE, RED)).all():
            raise GraphFormatError("party labels must be 0 (blue) or 1 (red)")
        party.setflags(write=False)
        self._party = party

        adjacency = sparse.csr_matrix(adjacency, dtype=np.int8)
        adjacency.sum_duplicates()
        adjacency.sort_indices()
        self._adjacency = adjacency
        self._degree = np.diff(adjacency.indptr).astype(np.int64)

        if stance is None:
            self._stance = np.full(len(self._node_ids), UNSET, dtype=np.int8)
        else:
            self._stance = np.array(stance, dtype=np.int8)
            if self._stance.shape != party.shape or not np.isin(self._stance, (0, 1)).all():
                raise GraphFormatError("stances must be 0 or 1 for every node")
        self.duplicate_edges = duplicate_edges

    # -- construction -----------------------------------------------------

    @classmethod
    def from_edges(cls, parties: Mapping[Hashable, int], edges: Iterable[Tuple[Hashable, Hashable]],
                   stances: Optional[Mapping[Hashable, int]] = None) -> "PartyGraph":
        """
        Build a graph from a node->party map and an edge iterable.

        Duplicate edges (in either orientation) are dropped and counted in
        ``duplicate_edges``.

        Raises:
            MissingNodeError: An edge references a node without a party
            GraphFormatError: Self-loop or non-binary party
        """
        node_ids = list(parties)
        index = {node_id: i for i, node_id in enumerate(node_ids)}
        party = []
        for node_id in node_ids:
            label = parties[node_id]
            if label not in (0, 1) or isinstance(label, bool):
                raise GraphFormatError(f"party of node {node_id!r} must be 0 or 1, got {label!r}")
            party.append(int(label))

        seen = set()
        rows: List[int] = []
        cols: List[int] = []
        duplicates = 0
        for u, v in edges:
            if u not in index:
                raise MissingNodeError(u)
            if v not in index:
                raise MissingNodeError(v)
            if u == v:
                raise GraphFormatError(f"self-loop on node {u!r}")
            i, j = index[u], index[v]
            key = (i, j) if i < j else (j, i)
            if key in seen:
                duplicates += 1
                continue
            seen.add(key)
            rows.extend((i, j))
            cols.extend((j, i))
        if duplicates:
            logger.warning("dropped %d duplicate edge(s)", duplicates)

        n = len(node_ids)
        adjacency = sparse.csr_matrix(
            (np.ones(len(rows), dtype=np.int8), (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64))),
            shape=(n, n),
        )
        stance = None
        if stances is not None:
            missing = [node_id for node_id in node_ids if node_id not in stances]
            if missing:
                raise MissingNodeError(missing[0], f"no stance given for node {missing[0]!r}")
            stance = [_check_stance(stances[node_id]) for node_id in node_ids]
        return cls(node_ids, party, adjacency, stance, duplicate_edges=duplicates)

    @classmethod
    def complete(cls, parties: Sequence[int], node_ids: Optional[Sequence[Hashable]] = None) -> "PartyGraph":
        """Fully connected graph over ``len(parties)`` nodes."""
        n = len(parties)
        dense = np.ones((n, n), dtype=np.int8)
        np.fill_diagonal(dense, 0)
        ids = list(range(n)) if node_ids is None else list(node_ids)
        return cls(ids, parties, sparse.csr_matrix(dense))

    @classmethod
    def from_networkx(cls, graph: nx.Graph, party_attr: str = "party",
                      stance_attr: str = "stance") -> "PartyGraph":
        """Convert a networkx graph whose nodes carry a party attribute."""
        if graph.is_directed():
            raise GraphFormatError("party graphs are undirected")
        parties = {}
        for node_id, data in graph.nodes(data=True):
            if party_attr not in data:
                raise MissingNodeError(node_id, f"node {node_id!r} has no '{party_attr}' attribute")
            parties[node_id] = data[party_attr]
        stances = None
        if all(stance_attr in data for _, data in graph.nodes(data=True)) and len(graph):
            stances = {node_id: data[stance_attr] for node_id, data in graph.nodes(data=True)}
        return cls.from_edges(parties, graph.edges(), stances)

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        for i, node_id in enumerate(self._node_ids):
            attrs = {"party": int(self._party[i])}
            if self._stance[i] != UNSET:
                attrs["stance"] = int(self._stance[i])
            graph.add_node(node_id, **attrs)
        graph.add_edges_from(self.edges())
        return graph

    def copy(self) -> "PartyGraph":
        clone = PartyGraph.__new__(PartyGraph)
        clone._node_ids = self._node_ids
        clone._index = self._index
        clone._party = self._party
        clone._adjacency = self._adjacency
        clone._degree = self._degree
        clone._stance = self._stance.copy()
        clone.duplicate_edges = self.duplicate_edges
        return clone

    # -- structure ----------------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return len(self._node_ids)

    def __len__(self) -> int:
        return self.n_nodes

    @property
    def node_ids(self) -> List[Hashable]:
        return list(self._node_ids)

    @property
    def party(self) -> np.ndarray:
        """Read-only party array in node order."""
        return self._party

    @property
    def adjacency(self) -> sparse.csr_matrix:
        return self._adjacency

    @property
    def degree(self) -> np.ndarray:
        return self._degree

    @property
    def n_edges(self) -> int:
        return int(self._adjacency.nnz // 2)

    @property
    def group_sizes(self) -> Tuple[int, int]:
        n_red = int(self._party.sum())
        return self.n_nodes - n_red, n_red

    def index_of(self, node_id: Hashable) -> int:
        try:
            return self._index[node_id]
        except KeyError:
            raise MissingNodeError(node_id) from None

    def __contains__(self, node_id: Hashable) -> bool:
        return node_id in self._index

    def neighbor_indices(self, i: int) -> np.ndarray:
        start, stop = self._adjacency.indptr[i], self._adjacency.indptr[i + 1]
        return self._adjacency.indices[start:stop]

    def neighbors(self, node_id: Hashable) -> List[Hashable]:
        return [self._node_ids[j] for j in self.neighbor_indices(self.index_of(node_id))]

    def party_of(self, node_id: Hashable) -> int:
        return int(self._party[self.index_of(node_id)])

    def edges(self) -> Iterator[Tuple[Hashable, Hashable]]:
        """Each undirected edge once, as (u, v) with u before v in node order."""
        upper = sparse.triu(self._adjacency, k=1, format="coo")
        order = np.lexsort((upper.col, upper.row))
        for i, j in zip(upper.row[order], upper.col[order]):
            yield self._node_ids[i], self._node_ids[j]

    # -- stances ------------------------------------------------------------

    @property
    def stance(self) -> np.ndarray:
        """Stance array in node order (UNSET = -1 before initialization)."""
        return self._stance

    @property
    def stances_initialized(self) -> bool:
        return bool((self._stance != UNSET).all())

    def require_stances(self) -> None:
        if not self.stances_initialized:
            missing = self._node_ids[int(np.argmax(self._stance == UNSET))]
            raise MissingNodeError(missing, f"stance of node {missing!r} is not initialized")

    def get_stance(self, node_id: Hashable) -> int:
        value = int(self._stance[self.index_of(node_id)])
        if value == UNSET:
            raise MissingNodeError(node_id, f"stance of node {node_id!r} is not initialized")
        return value

    def set_stance(self, node_id: Hashable, stance: int) -> None:
        self._stance[self.index_of(node_id)] = _check_stance(stance)

    def set_stances(self, stance: Sequence[int]) -> None:
        """Replace every stance at once (array in node order)."""
        values = np.asarray(stance, dtype=np.int8)
        if values.shape != self._stance.shape or not np.isin(values, (0, 1)).all():
            raise ParameterError("stances must be a 0/1 array with one entry per node")
        self._stance[:] = values

    def flip(self, i: int) -> None:
        self._stance[i] = 1 - self._stance[i]

    def stances(self) -> Dict[Hashable, int]:
        return {node_id: int(s) for node_id, s in zip(self._node_ids, self._stance)}

    def theta(self) -> Tuple[float, float]:
        """Fraction of blue and of red nodes holding stance 1 (nan for an empty group)."""
        self.require_stances()
        values = []
        for group in (BLUE, RED):
            members = self._party == group
            count = int(members.sum())
            values.append(float(self._stance[members].sum()) / count if count else float("nan"))
        return values[0], values[1]

    # -- neighbourhood counts ----------------------------------------------

    def neighbor_counts(self, i: int) -> np.ndarray:
        """2x2 array ``counts[party, stance]`` over the neighbours of node i."""
        self.require_stances()
        nbrs = self.neighbor_indices(i)
        counts = np.zeros((2, 2), dtype=np.int64)
        np.add.at(counts, (self._party[nbrs], self._stance[nbrs]), 1)
        return counts

    def all_neighbor_counts(self) -> np.ndarray:
        """(n, 2, 2) array of neighbour counts by (party, stance) for every node."""
        self.require_stances()
        cell = self._party.astype(np.int64) * 2 + self._stance
        onehot = np.zeros((self.n_nodes, 4), dtype=np.int64)
        onehot[np.arange(self.n_nodes), cell] = 1
        counts = self._adjacency.astype(np.int64) @ onehot
        return np.asarray(counts, dtype=np.int64).reshape(self.n_nodes, 2, 2)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PartyGraph):
            return NotImplemented
        return (
            self._node_ids == other._node_ids
            and np.array_equal(self._party, other._party)
            and np.array_equal(self._stance, other._stance)
            and (self._adjacency != other._adjacency).nnz == 0
        )

    __hash__ = None

    def __repr__(self) -> str:
        n_blue, n_red = self.group_sizes
        return f"PartyGraph(n={self.n_nodes}, blue={n_blue}, red={n_red}, edges={self.n_edges})"


def split_counts(counts: np.ndarray, party: int) -> Tuple[int, int, int, int]:
    """(m_in1, m_in0, m_out1, m_out0) from a ``counts[party, stance]`` table."""
    other = 1 - party
    return (int(counts[party, 1]), int(counts[party, 0]),
            int(counts[other, 1]), int(counts[other, 0]))


def def1_from_counts(m_in1: int, m_in0: int, m_out1: int, m_out0: int) -> Tuple[float, float]:
    degree = m_in1 + m_in0 + m_out1 + m_out0
    if degree == 0:
        return 0.0, 0.0
    return (m_in1 - m_in0) / degree, (m_out1 - m_out0) / degree


def def2_from_counts(m_in1: int, m_in0: int, m_out1: int, m_out0: int) -> Tuple[float, float]:
    n_in = m_in1 + m_in0
    n_out = m_out1 + m_out0
    d_in = (m_in1 - m_in0) / n_in if n_in else 0.0
    d_out = (m_out1 - m_out0) / n_out if n_out else 0.0
    return d_in, d_out


_FROM_COUNTS = {
    InfluenceMeasureKind.DEGREE_NORMALIZED_COUNT: def1_from_counts,
    InfluenceMeasureKind.GROUP_FRACTION: def2_from_counts,
}


def influence_from_counts(kind: InfluenceMeasureKind, m_in1: int, m_in0: int,
                          m_out1: int, m_out0: int) -> Tuple[float, float]:
    """(d_in_1, d_out_1) for user-count based measures."""
    try:
        return _FROM_COUNTS[kind](m_in1, m_in0, m_out1, m_out0)
    except KeyError:
        raise ConfigError(
            "message-count influence needs per-node message tallies and is not "
            "defined on a bare graph; use definition1 or definition2"
        ) from None


def influence_arrays(counts: np.ndarray, party: np.ndarray,
                     kind: InfluenceMeasureKind) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorized (d_in_1, d_out_1) for every node.

    Args:
        counts: (n, 2, 2) neighbour counts by (party, stance)
        party: (n,) party labels
        kind: Definition 1 or Definition 2
    """
    rows = np.arange(len(party))
    other = 1 - party
    m_in1 = counts[rows, party, 1].astype(float)
    m_in0 = counts[rows, party, 0].astype(float)
    m_out1 = counts[rows, other, 1].astype(float)
    m_out0 = counts[rows, other, 0].astype(float)
    with np.errstate(invalid="ignore", divide="ignore"):
        if kind is InfluenceMeasureKind.DEGREE_NORMALIZED_COUNT:
            degree = m_in1 + m_in0 + m_out1 + m_out0
            d_in = np.where(degree > 0, (m_in1 - m_in0) / degree, 0.0)
            d_out = np.where(degree > 0, (m_out1 - m_out0) / degree, 0.0)
        elif kind is InfluenceMeasureKind.GROUP_FRACTION:
            n_in = m_in1 + m_in0
            n_out = m_out1 + m_out0
            d_in = np.where(n_in > 0, (m_in1 - m_in0) / n_in, 0.0)
            d_out = np.where(n_out > 0, (m_out1 - m_out0) / n_out, 0.0)
        else:
            influence_from_counts(kind, 0, 0, 0, 0)
    return d_in, d_out


def _node_counts(graph: PartyGraph, node: Hashable) -> Tuple[int, int, int, int]:
    i = graph.index_of(node)
    return split_counts(graph.neighbor_counts(i), int(graph.party[i]))


def influence_def1(graph: PartyGraph, node: Hashable) -> InfluenceVector:
    """Degree-normalized net counts; an isolated node gets the zero vector."""
    return InfluenceVector.from_stance_one(*def1_from_counts(*_node_counts(graph, node)))


def influence_def2(graph: PartyGraph, node: Hashable) -> InfluenceVector:
    """Net fraction within each group; an empty group contributes 0."""
    return InfluenceVector.from_stance_one(*def2_from_counts(*_node_counts(graph, node)))


def influence_messages(in_counts: Tuple[int, int], out_counts: Tuple[int, int],
                       normalization: str = "total") -> InfluenceVector:
    """
    Exposure measured through messages instead of users.

    Args:
        in_counts: (stance-1, stance-0) messages from the in-group
        out_counts: (stance-1, stance-0) messages from the out-group
        normalization: ``"total"`` divides both nets by the grand total of
            messages; ``"group"`` divides each net by its own group's total

    Returns:
        InfluenceVector (all zero when there are no messages)
    """
    in1, in0 = in_counts
    out1, out0 = out_counts
    for value in (in1, in0, out1, out0):
        if value < 0:
            raise ParameterError(f"message counts must be >= 0, got {value}")
    if normalization == "total":
        total = in1 + in0 + out1 + out0
        if total == 0:
            return InfluenceVector.zero()
        return InfluenceVector.from_stance_one((in1 - in0) / total, (out1 - out0) / total)
    if normalization == "group":
        return InfluenceVector.from_stance_one(*def2_from_counts(in1, in0, out1, out0))
    raise ConfigError(f"unknown message normalization {normalization!r}; expected 'total' or 'group'")


def influence(graph: PartyGraph, node: Hashable, kind: InfluenceMeasureKind) -> InfluenceVector:
    """Dispatch to the graph-based influence measure named by ``kind``."""
    kind = InfluenceMeasureKind.parse(kind)
    return InfluenceVector.from_stance_one(*influence_from_counts(kind, *_node_counts(graph, node)))
