"""
Stochastic agent-based simulation on a PartyGraph.

One event samples a node uniformly at random; the node switches stance with
the probability given by :func:`~.core.transition_probability`. Model time
is ``events / n`` so that every node updates once per unit on average.

Random streams are numpy ``PCG64`` generators seeded through
``SeedSequence(seed, spawn_key=(replicate,))``, so replicate ``i`` of a
seeded ensemble is reproducible on its own.
"""

import logging
from dataclasses import dataclass, field
from typing import Hashable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from .core import (
    BLUE,
    RED,
    InfluenceMeasureKind,
    InfluenceVector,
    ModelParams,
    PartyGraph,
    influence_arrays,
    influence_from_counts,
    logistic,
    split_counts,
    transition_probability,
)
from .errors import ConfigError, MissingNodeError, ParameterError
from .estimation import StancePanel, TransitionRecord, observation_frame
from .validators import probability

logger = logging.getLogger(__name__)

RNG_ALGORITHM = "PCG64"
SCHEDULES = ("synchronous", "sweep")


def make_rng(seed: int, replicate: int = 0) -> np.random.Generator:
    """Generator for replicate ``replicate`` of a run seeded with ``seed``."""
    if seed < 0 or replicate < 0:
        raise ConfigError(f"seed and replicate must be >= 0, got {seed}, {replicate}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(replicate,))))


def _graph_measure(measure) -> InfluenceMeasureKind:
    kind = InfluenceMeasureKind.parse(measure)
    influence_from_counts(kind, 0, 0, 0, 0)
    return kind


# -- graph generators ------------------------------------------------------

def _split_sizes(n: int, r: float) -> Tuple[int, int]:
    if n < 2:
        raise ConfigError(f"graph needs at least 2 nodes, got {n}")
    if not 0.0 <= r <= 1.0:
        raise ConfigError(f"red fraction r must be in [0, 1], got {r}")
    n_red = int(round(r * n))
    return n - n_red, n_red


def complete_party_graph(n: int, r: float) -> PartyGraph:
    """Fully connected graph: the first ``n - round(r n)`` nodes blue, the rest red."""
    n_blue, n_red = _split_sizes(n, r)
    return PartyGraph.complete([BLUE] * n_blue + [RED] * n_red)


def two_block_graph(n: int, r: float, p_in: float, p_out: float, seed: int = 0) -> PartyGraph:
    """Two-block stochastic block model with homophily ``p_in`` vs ``p_out``."""
    for name, value in (("p_in", p_in), ("p_out", p_out)):
        if not probability().validate(value):
            raise ConfigError(f"{name} must be in [0, 1], got {value}")
    n_blue, n_red = _split_sizes(n, r)
    sbm = nx.stochastic_block_model([n_blue, n_red], [[p_in, p_out], [p_out, p_in]], seed=seed)
    parties = {node: int(data["block"]) for node, data in sbm.nodes(data=True)}
    return PartyGraph.from_edges(parties, sbm.edges())


# -- configuration -----------------------------------------------------------

@dataclass(frozen=True)
class InitialStanceSpec:
    """
    Either an explicit node->stance map or per-group Bernoulli prevalences.
    """

    stances: Optional[Mapping[Hashable, int]] = None
    theta_blue: Optional[float] = None
    theta_red: Optional[float] = None

    def __post_init__(self):
        explicit = self.stances is not None
        bernoulli = self.theta_blue is not None or self.theta_red is not None
        if explicit == bernoulli:
            raise ConfigError("give either an explicit stance map or both group prevalences")
        if bernoulli:
            for name in ("theta_blue", "theta_red"):
                result = probability().validate(getattr(self, name))
                if not result:
                    raise ParameterError(f"{name}: {result.error_message}")

    @classmethod
    def explicit(cls, stances: Mapping[Hashable, int]) -> "InitialStanceSpec":
        return cls(stances=dict(stances))

    @classmethod
    def bernoulli(cls, theta_blue: float, theta_red: float) -> "InitialStanceSpec":
        return cls(theta_blue=theta_blue, theta_red=theta_red)


def init_stances(graph: PartyGraph, spec: InitialStanceSpec, rng: np.random.Generator) -> PartyGraph:
    """
    Copy ``graph`` and assign every node a stance.

    Under the Bernoulli spec each blue node holds stance 1 independently
    with probability ``theta_blue`` (red likewise with ``theta_red``).

    Raises:
        MissingNodeError: The explicit map misses a node
    """
    result = graph.copy()
    if spec.stances is not None:
        values = []
        for node_id in graph.node_ids:
            if node_id not in spec.stances:
                raise MissingNodeError(node_id, f"no initial stance for node {node_id!r}")
            values.append(spec.stances[node_id])
        if not all(v in (0, 1) for v in values):
            raise ParameterError("initial stances must be 0 or 1")
        result.set_stances(values)
        return result

    prevalence = np.where(graph.party == BLUE, spec.theta_blue, spec.theta_red)
    draws = rng.random(graph.n_nodes)
    result.set_stances((draws < prevalence).astype(np.int8))
    return result


@dataclass(frozen=True)
class SimConfig:
    """
    Args:
        params: Model parameters
        measure: Definition 1 or Definition 2
        horizon_events: Number of node-update events
        record_every: Events between trajectory snapshots
        seed: Non-negative RNG seed
        init: Initial stance assignment
    """

    params: ModelParams
    measure: InfluenceMeasureKind
    horizon_events: int
    record_every: int
    seed: int
    init: InitialStanceSpec

    def __post_init__(self):
        object.__setattr__(self, "measure", _graph_measure(self.measure))
        if self.horizon_events < 1:
            raise ConfigError(f"horizon_events must be >= 1, got {self.horizon_events}")
        if self.record_every < 1:
            raise ConfigError(f"record_every must be >= 1, got {self.record_every}")
        if self.seed < 0:
            raise ConfigError(f"seed must be >= 0, got {self.seed}")

    @classmethod
    def for_time(cls, params: ModelParams, measure, n_nodes: int, t_end: float,
                 snapshots_per_unit: int, seed: int, init: InitialStanceSpec) -> "SimConfig":
        """Horizon and snapshot spacing expressed in model-time units."""
        horizon = max(1, int(round(t_end * n_nodes)))
        record_every = max(1, n_nodes // max(1, snapshots_per_unit))
        return cls(params, measure, horizon, record_every, seed, init)


@dataclass
class Trajectory:
    """Group prevalences of stance 1 recorded after selected events."""

    event_index: np.ndarray
    theta_blue: np.ndarray
    theta_red: np.ndarray
    n_nodes: int
    replicate: int = 0
    flips: int = 0

    @property
    def time(self) -> np.ndarray:
        return self.event_index / float(self.n_nodes)

    def __len__(self) -> int:
        return len(self.event_index)

    def sample_at(self, times: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
        """Linear interpolation of both prevalences at model times ``times``."""
        return (np.interp(times, self.time, self.theta_blue),
                np.interp(times, self.time, self.theta_red))

    def to_frame(self) -> pd.DataFrame:
        """Long format: replicate, event_index, t, group, theta."""
        n = len(self)
        return pd.DataFrame({
            "replicate": np.repeat(self.replicate, 2 * n),
            "event_index": np.tile(self.event_index, 2),
            "t": np.tile(self.time, 2),
            "group": ["blue"] * n + ["red"] * n,
            "theta": np.concatenate([self.theta_blue, self.theta_red]),
        })


# -- simulation ------------------------------------------------------------

class NetworkSimulator:
    """
    Event-driven simulator with an incremental neighbour-count cache.

    ``counts[v, party, stance]`` holds the number of v's neighbours in each
    (party, stance) cell; a flip of node i moves each neighbour's count
    between two cells of i's party. The cache must always equal
    ``graph.all_neighbor_counts()``.

    The simulator mutates the graph it is given; pass a copy to keep the
    original.
    """

    def __init__(self, graph: PartyGraph, params: ModelParams, measure, rng: np.random.Generator):
        graph.require_stances()
        self.graph = graph
        self.params = params
        self.measure = _graph_measure(measure)
        self.rng = rng
        self.counts = graph.all_neighbor_counts()
        self._party = graph.party.astype(np.intp)
        self._stance = graph.stance
        self._indptr = graph.adjacency.indptr
        self._indices = graph.adjacency.indices
        self._sizes = np.bincount(self._party, minlength=2)
        self._ones = np.bincount(self._party, weights=self._stance, minlength=2).astype(np.int64)
        self.events = 0
        self.flips = 0

    @property
    def n_nodes(self) -> int:
        return self.graph.n_nodes

    def influence_at(self, i: int) -> InfluenceVector:
        counts = split_counts(self.counts[i], int(self._party[i]))
        return InfluenceVector.from_stance_one(*influence_from_counts(self.measure, *counts))

    def switch_probability(self, i: int) -> float:
        g = self._party[i]
        c = self.counts[i]
        d_in, d_out = influence_from_counts(self.measure, int(c[g, 1]), int(c[g, 0]),
                                            int(c[1 - g, 1]), int(c[1 - g, 0]))
        if self._stance[i] == 1:
            d_in, d_out = -d_in, -d_out
        return logistic(self.params.logit(d_in, d_out))

    def apply(self, i: int, u: float) -> bool:
        """Consider node i with uniform draw u; flip it if u < p."""
        self.events += 1
        if not u < self.switch_probability(i):
            return False
        g = self._party[i]
        s = self._stance[i]
        nbrs = self._indices[self._indptr[i]:self._indptr[i + 1]]
        self.counts[nbrs, g, s] -= 1
        self.counts[nbrs, g, 1 - s] += 1
        self._stance[i] = 1 - s
        self._ones[g] += 1 - 2 * s
        self.flips += 1
        return True

    def step(self) -> bool:
        i = int(self.rng.integers(self.n_nodes))
        return self.apply(i, self.rng.random())

    def advance(self, events: int) -> int:
        """Run ``events`` events drawing node and uniform variates in one block."""
        nodes = self.rng.integers(0, self.n_nodes, size=events)
        draws = self.rng.random(events)
        flipped = 0
        for i, u in zip(nodes.tolist(), draws.tolist()):
            flipped += self.apply(i, u)
        return flipped

    def theta(self) -> Tuple[float, float]:
        values = []
        for g in (BLUE, RED):
            values.append(self._ones[g] / self._sizes[g] if self._sizes[g] else float("nan"))
        return values[0], values[1]

    def cache_is_consistent(self) -> bool:
        return bool(np.array_equal(self.counts, self.graph.all_neighbor_counts()))


def step(graph: PartyGraph, params: ModelParams, measure, rng: np.random.Generator) -> Tuple[PartyGraph, bool]:
    """
    One event with influence recomputed from scratch.

    Draws the node index and then the uniform variate, the same order as
    :meth:`NetworkSimulator.step`. The graph is updated in place and
    returned.
    """
    kind = _graph_measure(measure)
    graph.require_stances()
    i = int(rng.integers(graph.n_nodes))
    u = rng.random()
    counts = split_counts(graph.neighbor_counts(i), int(graph.party[i]))
    inf = InfluenceVector.from_stance_one(*influence_from_counts(kind, *counts))
    p = transition_probability(params, inf, int(graph.stance[i]))
    if u < p:
        graph.flip(i)
        return graph, True
    return graph, False


def run(graph: PartyGraph, config: SimConfig, replicate: int = 0) -> Trajectory:
    """
    Simulate ``config.horizon_events`` events on a copy of ``graph``.

    The trajectory holds ceil(horizon / record_every) + 1 rows: the
    initial state plus one snapshot after every ``record_every`` events and
    after the final event.
    """
    rng = make_rng(config.seed, replicate)
    working = init_stances(graph, config.init, rng)
    sim = NetworkSimulator(working, config.params, config.measure, rng)

    n_rows = -(-config.horizon_events // config.record_every) + 1
    events = np.zeros(n_rows, dtype=np.int64)
    blue = np.zeros(n_rows)
    red = np.zeros(n_rows)
    blue[0], red[0] = sim.theta()

    remaining = config.horizon_events
    row = 1
    while remaining > 0:
        chunk = min(config.record_every, remaining)
        sim.advance(chunk)
        remaining -= chunk
        events[row] = sim.events
        blue[row], red[row] = sim.theta()
        row += 1

    logger.debug("replicate %d: %d events, %d flips", replicate, sim.events, sim.flips)
    return Trajectory(events, blue, red, graph.n_nodes, replicate, sim.flips)


def ensemble_run(graph: PartyGraph, config: SimConfig, replicates: int, n_jobs: int = 1,
                 replicate_ids: Optional[Sequence[int]] = None) -> List[Trajectory]:
    """
    Independent replicates; replicate i draws from ``make_rng(seed, i)``.

    Args:
        graph: Shared read-only graph (each replicate works on a copy)
        config: Simulation config
        replicates: Number of replicates (>= 1)
        n_jobs: joblib worker count
        replicate_ids: Explicit stream ids (defaults to 0..replicates-1)
    """
    if replicates < 1:
        raise ConfigError(f"replicates must be >= 1, got {replicates}")
    ids = list(range(replicates)) if replicate_ids is None else list(replicate_ids)
    if len(ids) != replicates:
        raise ConfigError("replicate_ids must have one entry per replicate")
    logger.info("running %d replicate(s) on %d worker(s)", replicates, n_jobs)
    return Parallel(n_jobs=n_jobs)(delayed(run)(graph, config, replicate=i) for i in ids)


def ensemble_mean(trajectories: Sequence[Trajectory]) -> Trajectory:
    """Pointwise mean of replicates sharing one snapshot schedule."""
    if not trajectories:
        raise ConfigError("no trajectories to average")
    first = trajectories[0]
    for other in trajectories[1:]:
        if not np.array_equal(other.event_index, first.event_index):
            raise ConfigError("trajectories use different snapshot schedules")
    return Trajectory(
        first.event_index.copy(),
        np.mean([t.theta_blue for t in trajectories], axis=0),
        np.mean([t.theta_red for t in trajectories], axis=0),
        first.n_nodes,
        replicate=-1,
        flips=int(sum(t.flips for t in trajectories)),
    )


# -- synthetic panels ----------------------------------------------------------

@dataclass
class SyntheticPanel:
    """Stance panel plus the exact Case-1 records that generated it."""

    panel: StancePanel
    records: List[TransitionRecord] = field(default_factory=list)
    graph: Optional[PartyGraph] = None

    def observation_frame(self) -> pd.DataFrame:
        """Case-1 observation table (node_id, time_index, party, stance_t, stance_t1, d_in_1, d_out_1)."""
        party = {}
        if self.graph is not None:
            party = {str(node_id): int(p) for node_id, p in zip(self.graph.node_ids, self.graph.party)}
        return observation_frame(self.records, party)


def simulate_panel(graph: PartyGraph, params: ModelParams, measure, intervals: int, seed: int,
                   init: InitialStanceSpec, schedule: str = "synchronous",
                   interval_days: Optional[float] = None) -> SyntheticPanel:
    """
    Generate a stance panel with known parameters.

    Schedules:
        synchronous: every node updates once per interval from the
            interval-start state (all nodes observed at every interval)
        sweep: every node updates once per interval in random order and
            sees the stances current at its turn

    Args:
        graph: Graph to simulate on (not modified)
        params: Generating parameters
        measure: Definition 1 or 2
        intervals: Number of transitions; the panel has ``intervals + 1``
            snapshots
        seed: RNG seed
        init: Initial stances
        schedule: ``"synchronous"`` or ``"sweep"``
        interval_days: Annotation carried on the panel

    Returns:
        SyntheticPanel with the panel, Case-1 records and the final graph
    """
    if schedule not in SCHEDULES:
        raise ConfigError(f"unknown schedule {schedule!r}; expected one of {', '.join(SCHEDULES)}")
    if intervals < 1:
        raise ConfigError(f"intervals must be >= 1, got {intervals}")
    kind = _graph_measure(measure)
    rng = make_rng(seed)
    working = init_stances(graph, init, rng)
    node_ids = working.node_ids
    party = working.party

    snapshots = [working.stance.copy()]
    records: List[TransitionRecord] = []
    sim = NetworkSimulator(working, params, kind, rng) if schedule == "sweep" else None

    for k in range(intervals):
        before = working.stance.copy()
        if schedule == "synchronous":
            d_in, d_out = influence_arrays(working.all_neighbor_counts(), party.astype(np.intp), kind)
            sign = np.where(before == 0, 1.0, -1.0)
            p = logistic(params.logit(sign * d_in, sign * d_out))
            switched = rng.random(working.n_nodes) < p
            after = np.where(switched, 1 - before, before).astype(np.int8)
            working.set_stances(after)
            for i in range(working.n_nodes):
                inf = InfluenceVector.from_stance_one(d_in[i], d_out[i])
                records.append(TransitionRecord(int(before[i]), int(after[i]), inf, node_ids[i], k))
        else:
            for i in rng.permutation(working.n_nodes).tolist():
                inf = sim.influence_at(i)
                s = int(working.stance[i])
                sim.apply(i, rng.random())
                records.append(TransitionRecord(s, int(working.stance[i]), inf, node_ids[i], k))
        snapshots.append(working.stance.copy())

    rows = []
    for k, stance in enumerate(snapshots):
        rows.extend(zip(node_ids, [k] * len(node_ids), party.tolist(), stance.tolist()))
    panel = StancePanel.from_rows(rows, interval_days=interval_days)
    logger.info("synthesized %d-node panel over %d intervals (%s)", working.n_nodes, intervals, schedule)
    return SyntheticPanel(panel, records, working)
