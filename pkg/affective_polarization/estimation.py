"""
Maximum-likelihood estimation of (alpha, beta, delta) from stance transitions.

Two ways to build the design:

- Case 1: the influence each node experienced is observed directly
  (:func:`build_observations_case1`).
- Case 2: only a stance panel is available; every pair of consecutive
  intervals is treated as a sample from a fully connected network and the
  influences are aggregated from (party, stance) cell counts
  (:func:`build_observations_case2`).

Both feed :func:`fit_logistic`, a Newton/IRLS solver for

    logit P(J = 1) = b0 + b1 * x_in + b2 * x_out

with alpha = b1, beta = -b2, delta = -b0.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Hashable, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.special import expit, logit

from .core import InfluenceMeasureKind, InfluenceVector, ModelParams, logistic
from .errors import (
    ConfigError,
    GraphFormatError,
    InsufficientObservationsError,
    NotConvergedError,
    ParameterError,
    SeparationError,
    SingularDesignError,
)

logger = logging.getLogger(__name__)

J_CONVENTIONS = ("transition", "direction")
PROBABILITY_CLIP = 1e-12


@dataclass(frozen=True)
class TransitionObservation:
    """One row of the design: J plus the influence toward the opposite stance."""

    j: int
    x_in: float
    x_out: float
    node_id: Optional[Hashable] = None
    time: Optional[int] = None

    def __post_init__(self):
        if self.j not in (0, 1) or isinstance(self.j, bool):
            raise ParameterError(f"J must be 0 or 1, got {self.j!r}")
        if not (math.isfinite(self.x_in) and math.isfinite(self.x_out)):
            raise ParameterError(f"covariates must be finite, got ({self.x_in}, {self.x_out})")


class TransitionRecord(NamedTuple):
    """Observed stance pair of one node across two adjacent time points."""

    stance_t: int
    stance_t1: int
    influence: InfluenceVector
    node_id: Optional[Hashable] = None
    time: Optional[int] = None


OBSERVATION_COLUMNS = ("node_id", "time_index", "party", "stance_t", "stance_t1", "d_in_1", "d_out_1")


def observation_frame(records: Iterable[TransitionRecord], parties: Optional[Dict[str, int]] = None) -> pd.DataFrame:
    """Case-1 observation table; ``party`` is looked up by node id and is -1 where unknown."""
    parties = parties or {}
    rows = [
        (str(rec.node_id), rec.time, parties.get(str(rec.node_id), -1), rec.stance_t, rec.stance_t1,
         rec.influence.d_in_1, rec.influence.d_out_1)
        for rec in records
    ]
    return pd.DataFrame(rows, columns=list(OBSERVATION_COLUMNS))


def _check_convention(j_convention: str) -> str:
    if j_convention not in J_CONVENTIONS:
        raise ConfigError(f"unknown J convention {j_convention!r}; expected one of {', '.join(J_CONVENTIONS)}")
    return j_convention


def _binary(value: Any, name: str) -> int:
    if value not in (0, 1) or isinstance(value, bool):
        raise ParameterError(f"{name} must be 0 or 1, got {value!r}")
    return int(value)


def build_observations_case1(records: Iterable[Sequence], j_convention: str = "transition") -> List[TransitionObservation]:
    """
    Turn observed (stance_t, stance_t1, influence) records into design rows.

    With the default ``"transition"`` convention every record yields a row:
    J = 1 iff the stance changed, and the covariates are the influence toward
    the stance the node did *not* hold. The ``"direction"`` convention keeps
    only switching records and sets J = 1 for 0->1, J = 0 for 1->0, with
    covariates oriented toward stance 1.

    Args:
        records: Tuples ``(stance_t, stance_t1, influence[, node_id[, time]])``
        j_convention: ``"transition"`` or ``"direction"``

    Returns:
        List of TransitionObservation
    """
    _check_convention(j_convention)
    observations = []
    for record in records:
        record = TransitionRecord(*record)
        s = _binary(record.stance_t, "stance_t")
        s1 = _binary(record.stance_t1, "stance_t1")
        if j_convention == "transition":
            x_in, x_out = record.influence.toward(1 - s)
            j = int(s1 != s)
        else:
            if s1 == s:
                continue
            x_in, x_out = record.influence.toward(1)
            j = s1
        observations.append(TransitionObservation(j, x_in, x_out, record.node_id, record.time))
    return observations


class StancePanel:
    """
    Longitudinal (node_id, interval, party, stance) table.

    Node ids are kept as strings so a panel compares equal to its own
    CSV round trip. ``interval_days`` is an annotation only.
    """

    COLUMNS = ("node_id", "interval", "party", "stance")

    def __init__(self, frame: pd.DataFrame, interval_days: Optional[float] = None,
                 source: Optional[str] = None, line_offset: int = 0):
        missing = [c for c in self.COLUMNS if c not in frame.columns]
        if missing:
            raise GraphFormatError(f"panel is missing column(s) {', '.join(missing)}", path=source)
        frame = frame.loc[:, list(self.COLUMNS)].copy()
        frame["node_id"] = frame["node_id"].astype(str)
        for column in ("interval", "party", "stance"):
            values = pd.to_numeric(frame[column], errors="coerce")
            bad = values.isna() | (values != values.round())
            if bad.any():
                row = int(np.flatnonzero(bad.to_numpy())[0])
                raise GraphFormatError(f"non-integer value {frame[column].iloc[row]!r}",
                                       path=source, line=row + 2 + line_offset, column=column)
            frame[column] = values.astype(np.int64)
        for column in ("party", "stance"):
            bad = ~frame[column].isin((0, 1))
            if bad.any():
                row = int(np.flatnonzero(bad.to_numpy())[0])
                raise GraphFormatError(f"{column} must be 0 or 1, got {frame[column].iloc[row]}",
                                       path=source, line=row + 2 + line_offset, column=column)
        if (frame["interval"] < 0).any():
            raise GraphFormatError("interval indices must be >= 0", path=source, column="interval")
        duplicated = frame.duplicated(["node_id", "interval"])
        if duplicated.any():
            row = int(np.flatnonzero(duplicated.to_numpy())[0])
            raise GraphFormatError(
                f"node {frame['node_id'].iloc[row]!r} appears twice in interval {frame['interval'].iloc[row]}",
                path=source, line=row + 2 + line_offset,
            )
        parties = frame.groupby("node_id")["party"].nunique()
        if (parties > 1).any():
            node = parties[parties > 1].index[0]
            raise GraphFormatError(f"party of node {node!r} changes across intervals", path=source, column="party")
        self._frame = frame.reset_index(drop=True)
        self.interval_days = interval_days

    @classmethod
    def from_rows(cls, rows: Iterable[Tuple[Hashable, int, int, int]],
                  interval_days: Optional[float] = None) -> "StancePanel":
        return cls(pd.DataFrame(list(rows), columns=list(cls.COLUMNS)), interval_days)

    @property
    def frame(self) -> pd.DataFrame:
        return self._frame.copy()

    @property
    def intervals(self) -> List[int]:
        return sorted(int(k) for k in self._frame["interval"].unique())

    def snapshot(self, interval: int) -> pd.DataFrame:
        return self._frame[self._frame["interval"] == interval]

    def __len__(self) -> int:
        return len(self._frame)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StancePanel):
            return NotImplemented
        return self._frame.equals(other._frame)

    __hash__ = None

    def __repr__(self) -> str:
        return f"StancePanel(rows={len(self)}, intervals={len(self.intervals)})"


def _interval_pairs(panel: StancePanel) -> List[Tuple[int, int]]:
    intervals = panel.intervals
    present = set(intervals)
    return [(k, k + 1) for k in intervals if k + 1 in present]


def panel_interval_summary(panel: StancePanel) -> Dict[str, Any]:
    """Shared-node counts per consecutive interval pair and the pairs skipped."""
    frame = panel.frame
    shared = []
    for k, k1 in _interval_pairs(panel):
        nodes_k = set(frame.loc[frame["interval"] == k, "node_id"])
        nodes_k1 = set(frame.loc[frame["interval"] == k1, "node_id"])
        shared.append({"interval": k, "shared_nodes": len(nodes_k & nodes_k1)})
    return {
        "pairs_used": sum(1 for item in shared if item["shared_nodes"] > 0),
        "pairs_skipped": sum(1 for item in shared if item["shared_nodes"] == 0),
        "shared_nodes": shared,
    }


def build_observations_case2(panel: StancePanel, include_self: bool = True,
                             j_convention: str = "transition") -> List[TransitionObservation]:
    """
    Fully connected aggregation over consecutive interval pairs.

    For each pair (k, k+1) only nodes present in both intervals are kept.
    Stance prevalences at k are (party, stance) cell counts divided by the
    number of shared nodes; a blue node at stance 0 gets
    x_in = theta_B - theta_B', x_out = theta_R - theta_R', with the signs
    mirrored for red nodes and for stance-1 holders.

    Args:
        panel: The stance panel
        include_self: Count the focal node in its own aggregate (default).
            When False the node is removed and the counts are normalized by
            the remaining shared nodes, matching Definition 1 on the complete
            graph.
        j_convention: ``"transition"`` or ``"direction"``

    Returns:
        List of TransitionObservation in interval order
    """
    _check_convention(j_convention)
    frame = panel.frame
    observations: List[TransitionObservation] = []
    skipped = 0
    for k, k1 in _interval_pairs(panel):
        current = frame[frame["interval"] == k]
        following = frame.loc[frame["interval"] == k1, ["node_id", "stance"]]
        merged = current.merge(following, on="node_id", suffixes=("", "_next"), sort=False)
        if merged.empty:
            skipped += 1
            continue

        party = merged["party"].to_numpy()
        stance = merged["stance"].to_numpy()
        stance_next = merged["stance_next"].to_numpy()
        cells = np.zeros((2, 2), dtype=np.int64)
        np.add.at(cells, (party, stance), 1)
        net = (cells[:, 1] - cells[:, 0]).astype(float)

        net_in = net[party]
        net_out = net[1 - party]
        if include_self:
            denom = float(len(merged))
        else:
            net_in = net_in - (2 * stance - 1)
            denom = float(len(merged) - 1)
        if denom > 0:
            d_in_1 = net_in / denom
            d_out_1 = net_out / denom
        else:
            d_in_1 = np.zeros(len(merged))
            d_out_1 = np.zeros(len(merged))
        logger.debug("interval %d: %d shared nodes, cells %s", k, len(merged), cells.tolist())

        if j_convention == "transition":
            sign = np.where(stance == 0, 1.0, -1.0)
            x_in, x_out = sign * d_in_1, sign * d_out_1
            j = (stance_next != stance).astype(int)
            keep = np.arange(len(merged))
        else:
            x_in, x_out = d_in_1, d_out_1
            j = stance_next
            keep = np.flatnonzero(stance_next != stance)
        node_ids = merged["node_id"].to_numpy()
        for idx in keep:
            observations.append(
                TransitionObservation(int(j[idx]), float(x_in[idx]), float(x_out[idx]), node_ids[idx], int(k))
            )

    if skipped:
        logger.warning("skipped %d interval pair(s) with no shared nodes", skipped)
    return observations


def design_matrix(observations: Sequence[TransitionObservation]) -> Tuple[np.ndarray, np.ndarray]:
    """(X, y) with X columns (1, x_in, x_out)."""
    n = len(observations)
    X = np.ones((n, 3))
    y = np.empty(n)
    for row, obs in enumerate(observations):
        X[row, 1] = obs.x_in
        X[row, 2] = obs.x_out
        y[row] = obs.j
    return X, y


def log_likelihood(coef: np.ndarray, X: np.ndarray, y: np.ndarray) -> float:
    """Bernoulli log-likelihood, probabilities clipped away from {0, 1}."""
    p = np.clip(expit(X @ coef), PROBABILITY_CLIP, 1.0 - PROBABILITY_CLIP)
    return float(np.sum(y * np.log(p) + (1.0 - y) * np.log1p(-p)))


def score(coef: np.ndarray, X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Gradient of :func:`log_likelihood` with respect to the coefficients."""
    return X.T @ (y - expit(X @ coef))


def observed_information(coef: np.ndarray, X: np.ndarray) -> np.ndarray:
    p = expit(X @ coef)
    w = p * (1.0 - p)
    return X.T @ (X * w[:, None])


def null_log_likelihood(y: np.ndarray) -> float:
    """Log-likelihood of the intercept-only model at its MLE."""
    q = float(np.mean(y))
    q = min(max(q, PROBABILITY_CLIP), 1.0 - PROBABILITY_CLIP)
    n1 = float(np.sum(y))
    return n1 * math.log(q) + (len(y) - n1) * math.log1p(-q)


@dataclass(frozen=True)
class FitOptions:
    """
    Solver options.

    Args:
        max_iter: Newton iteration cap
        tol: Gradient-norm convergence tolerance
        ridge: L2 penalty on the two slopes (0 = plain MLE)
        intercept_only: Fit only delta, returning -logit(switch rate)
        separation_bound: Coefficient magnitude treated as divergence
    """

    max_iter: int = 100
    tol: float = 1e-8
    ridge: float = 0.0
    intercept_only: bool = False
    separation_bound: float = 30.0

    def __post_init__(self):
        if self.max_iter < 1:
            raise ConfigError(f"max_iter must be >= 1, got {self.max_iter}")
        if not self.tol > 0:
            raise ConfigError(f"tol must be > 0, got {self.tol}")
        if self.ridge < 0:
            raise ConfigError(f"ridge must be >= 0, got {self.ridge}")


# maps coefficients (b0, b1, b2) to (alpha, beta, delta)
_TO_PARAMS = np.array([[0.0, 1.0, 0.0],
                       [0.0, 0.0, -1.0],
                       [-1.0, 0.0, 0.0]])


@dataclass
class EstimationResult:
    """Fitted parameters with their diagnostics."""

    alpha_hat: float
    beta_hat: float
    delta_hat: float
    std_errors: Tuple[float, float, float]
    pseudo_r2: float
    log_likelihood: float
    n_obs: int
    converged: bool
    iterations: int
    gradient_norm: float = 0.0
    null_log_likelihood: float = float("nan")
    switch_rate: float = float("nan")
    covariance: Optional[np.ndarray] = None
    intercept_only: bool = False
    ridge: float = 0.0
    j_convention: str = "transition"
    measure: Optional[str] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def estimates(self) -> Tuple[float, float, float]:
        return self.alpha_hat, self.beta_hat, self.delta_hat

    @property
    def params(self) -> ModelParams:
        return ModelParams(max(self.alpha_hat, 0.0), self.beta_hat, max(self.delta_hat, 0.0),
                           allow_negative_beta=True)

    def z_scores(self, truth: ModelParams) -> Tuple[float, float, float]:
        """|estimate - truth| / SE for alpha, beta, delta."""
        values = []
        for est, true, se in zip(self.estimates, (truth.alpha, truth.beta, truth.delta), self.std_errors):
            values.append(abs(est - true) / se if se > 0 else float("inf"))
        return tuple(values)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "estimates": {"alpha": self.alpha_hat, "beta": self.beta_hat, "delta": self.delta_hat},
            "std_errors": dict(zip(("alpha", "beta", "delta"), self.std_errors)),
            "pseudo_r2": self.pseudo_r2,
            "pseudo_r2_kind": "mcfadden",
            "log_likelihood": self.log_likelihood,
            "null_log_likelihood": self.null_log_likelihood,
            "n_obs": self.n_obs,
            "switch_rate": self.switch_rate,
            "solver": {
                "method": "newton-irls",
                "converged": self.converged,
                "iterations": self.iterations,
                "gradient_norm": self.gradient_norm,
                "ridge": self.ridge,
                "intercept_only": self.intercept_only,
            },
            "measure": self.measure,
            "j_convention": self.j_convention,
            "metadata": dict(self.metadata),
        }


def _as_arrays(observations) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(observations, tuple) and len(observations) == 2 and isinstance(observations[0], np.ndarray):
        X, y = observations
        return np.asarray(X, dtype=float), np.asarray(y, dtype=float)
    return design_matrix(list(observations))


def fit_intercept_only(observations, measure: Optional[str] = None,
                       j_convention: str = "transition") -> EstimationResult:
    """Closed-form intercept MLE: delta = -logit(q), q the switch rate."""
    X, y = _as_arrays(observations)
    n = len(y)
    if n == 0:
        raise InsufficientObservationsError("insufficient observations: the design is empty")
    q = float(np.mean(y))
    if q <= 0.0 or q >= 1.0:
        raise SeparationError(
            f"every observation has J = {int(q)}; the intercept diverges. "
            "Use a longer panel or the ridge option"
        )
    se = 1.0 / math.sqrt(n * q * (1.0 - q))
    ll0 = null_log_likelihood(y)
    return EstimationResult(
        alpha_hat=0.0, beta_hat=0.0, delta_hat=-float(logit(q)),
        std_errors=(float("nan"), float("nan"), se),
        pseudo_r2=0.0, log_likelihood=ll0, n_obs=n, converged=True, iterations=0,
        gradient_norm=0.0, null_log_likelihood=ll0, switch_rate=q,
        intercept_only=True, j_convention=j_convention, measure=measure,
    )


def _line_search(objective, coef: np.ndarray, step: np.ndarray, current: float,
                 min_scale: float = 1e-10) -> Optional[Tuple[np.ndarray, float, float]]:
    """Halve ``step`` until ``objective`` does not decrease; None when no such scale exists."""
    scale = 1.0
    while scale >= min_scale:
        candidate = coef + scale * step
        value = objective(candidate)
        if value >= current - 1e-12 * (1.0 + abs(current)):
            return candidate, value, scale
        scale *= 0.5
    return None


def fit_logistic(observations: Union[Sequence[TransitionObservation], Tuple[np.ndarray, np.ndarray]],
                 options: Optional[FitOptions] = None, measure: Optional[Any] = None,
                 j_convention: str = "transition",
                 metadata: Optional[Dict[str, Any]] = None) -> EstimationResult:
    """
    Fit the switching law by Newton-Raphson with step halving.

    Args:
        observations: TransitionObservation rows, or an ``(X, y)`` pair from
            :func:`design_matrix`
        options: Solver options (defaults: tol 1e-8, 100 iterations, no ridge)
        measure: Influence measure the covariates were built with (recorded)
        j_convention: Convention the rows were built with (recorded)
        metadata: Extra key/values copied into the result

    Returns:
        EstimationResult; ``converged`` is False if the iteration cap was hit

    Raises:
        InsufficientObservationsError: Fewer than 3 rows
        SingularDesignError: Rank-deficient design
        SeparationError: A coefficient diverges past ``separation_bound``
    """
    options = options or FitOptions()
    measure_name = str(InfluenceMeasureKind.parse(measure)) if measure is not None else None
    if options.intercept_only:
        result = fit_intercept_only(observations, measure_name, j_convention)
        result.metadata.update(metadata or {})
        return result

    X, y = _as_arrays(observations)
    n = len(y)
    if n < 3:
        raise InsufficientObservationsError(f"insufficient observations: need at least 3 rows, got {n}")
    if np.linalg.matrix_rank(X) < 3:
        raise SingularDesignError(
            "design matrix is rank-deficient (constant or collinear influence columns); "
            "the intercept-only mode still estimates delta"
        )

    penalty = np.diag([0.0, options.ridge, options.ridge])
    if options.ridge:
        logger.warning("ridge penalty %.4g applied to both slopes", options.ridge)

    def objective(c: np.ndarray) -> float:
        return log_likelihood(c, X, y) - 0.5 * float(c @ penalty @ c)

    def gradient(c: np.ndarray) -> np.ndarray:
        return score(c, X, y) - penalty @ c

    coef = np.zeros(3)
    current = objective(coef)
    grad = gradient(coef)
    grad_norm = float(np.linalg.norm(grad))
    iterations = 0
    while grad_norm >= options.tol and iterations < options.max_iter:
        iterations += 1
        hessian = observed_information(coef, X) + penalty
        try:
            step = np.linalg.solve(hessian, grad)
        except np.linalg.LinAlgError:
            raise SingularDesignError("observed information is singular at the current iterate") from None

        accepted = _line_search(objective, coef, step, current)
        if accepted is None:
            logger.warning("no ascent along the Newton step at iteration %d; keeping the previous iterate", iterations)
            break
        coef, current, scale = accepted
        grad = gradient(coef)
        grad_norm = float(np.linalg.norm(grad))
        logger.debug("newton %d: coef=%s |grad|=%.3e step=%.3g", iterations, coef, grad_norm, scale)

        if np.max(np.abs(coef)) > options.separation_bound and grad_norm >= options.tol:
            raise SeparationError(
                f"coefficients diverge ({np.round(coef, 2).tolist()}): the data are (quasi-)"
                "completely separated. Refit with a ridge penalty"
            )

    converged = grad_norm < options.tol
    if not converged:
        logger.warning("fit stopped after %d iterations with |grad| = %.3e", iterations, grad_norm)
    else:
        logger.info("fit converged in %d iterations", iterations)

    hessian = observed_information(coef, X) + penalty
    try:
        cov_coef = np.linalg.inv(hessian)
    except np.linalg.LinAlgError:
        raise SingularDesignError("observed information is singular at the optimum") from None
    covariance = _TO_PARAMS @ cov_coef @ _TO_PARAMS.T
    std_errors = tuple(float(v) for v in np.sqrt(np.diag(covariance)))

    ll = log_likelihood(coef, X, y)
    ll0 = null_log_likelihood(y)
    pseudo_r2 = 1.0 - ll / ll0 if ll0 < 0 else 0.0

    return EstimationResult(
        alpha_hat=float(coef[1]), beta_hat=float(-coef[2]), delta_hat=float(-coef[0]),
        std_errors=std_errors, pseudo_r2=float(pseudo_r2), log_likelihood=ll, n_obs=n,
        converged=converged, iterations=iterations, gradient_norm=grad_norm,
        null_log_likelihood=ll0, switch_rate=float(np.mean(y)), covariance=covariance,
        ridge=options.ridge, j_convention=j_convention, measure=measure_name,
        metadata=dict(metadata or {}),
    )


def predict_switch_probability(result: EstimationResult, x_in, x_out):
    """Forward evaluation of the fitted law (no clipping)."""
    if not result.converged:
        raise NotConvergedError("cannot predict from a fit that did not converge")
    return logistic(result.alpha_hat * np.asarray(x_in, dtype=float)
                    - result.beta_hat * np.asarray(x_out, dtype=float)
                    - result.delta_hat)


def sample_from_law(params: ModelParams, n_rows: int, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Draw ``n_rows`` design rows straight from the logistic law.

    Covariates are uniform on [-1, 1]; returns ``(X, y)`` ready for
    :func:`fit_logistic`.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    x_in = rng.uniform(-1.0, 1.0, n_rows)
    x_out = rng.uniform(-1.0, 1.0, n_rows)
    p = expit(params.logit(x_in, x_out))
    y = (rng.random(n_rows) < p).astype(float)
    X = np.column_stack([np.ones(n_rows), x_in, x_out])
    return X, y


@dataclass
class RecoveryRecord:
    seed: int
    result: EstimationResult
    z_scores: Tuple[float, float, float]
    passed: bool


@dataclass
class RecoveryReport:
    """Per-seed recovery of known parameters."""

    truth: ModelParams
    records: List[RecoveryRecord]
    n_se: float = 3.0

    @property
    def pass_count(self) -> int:
        return sum(record.passed for record in self.records)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "truth": self.truth.to_dict(),
            "n_se": self.n_se,
            "pass_count": self.pass_count,
            "n_seeds": len(self.records),
            "seeds": [
                {
                    "seed": record.seed,
                    "passed": record.passed,
                    "z_scores": dict(zip(("alpha", "beta", "delta"), record.z_scores)),
                    "estimates": record.result.to_dict()["estimates"],
                    "std_errors": record.result.to_dict()["std_errors"],
                    "n_obs": record.result.n_obs,
                    "converged": record.result.converged,
                }
                for record in self.records
            ],
        }


def recovery_report(truth: ModelParams, results: Dict[int, EstimationResult], n_se: float = 3.0) -> RecoveryReport:
    """Flag each seed whose three estimates all lie within ``n_se`` SEs of truth."""
    records = []
    for seed, result in results.items():
        z = result.z_scores(truth)
        records.append(RecoveryRecord(seed, result, z, result.converged and all(v <= n_se for v in z)))
    return RecoveryReport(truth, records, n_se)
