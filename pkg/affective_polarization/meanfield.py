"""
Deterministic mean-field dynamics on fully connected populations.

Two-party system: with a fraction ``r`` of red nodes and stance-1
prevalences theta_B, theta_R, the drive toward stance 1 under Definition 1 is

    L_B = alpha (1 - r)(2 theta_B - 1) - beta r (2 theta_R - 1)
    L_R = alpha r (2 theta_R - 1) - beta (1 - r)(2 theta_B - 1)

so p01 = sigma(L - delta), p10 = sigma(-L - delta) and

    d theta / dt = (1 - theta) p01 - theta p10

Definition 2 drops the group-size factors. The N-party system replaces
(alpha, -beta) with an emotion matrix A, using the first influence measure.

Both systems integrate with forward Euler (clamped to [0, 1]); the two-party
system can also use scipy's RK45 sampled on the same grid.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp
from scipy.special import expit

from .core import InfluenceMeasureKind, ModelParams, logistic
from .errors import ConfigError, ParameterError
from .validators import float_num, open_fraction, probability

logger = logging.getLogger(__name__)

DEFAULT_EPSILON = 0.01
DEFAULT_T_END = 100.0
DAYS_PER_UNIT = 7.0
METHODS = ("euler", "rk45")


def _check(validator, value, name: str) -> None:
    result = validator.validate(value)
    if not result:
        raise ParameterError(f"{name}: {result.error_message}")


def _check_horizon(epsilon: float, t_end: float) -> int:
    _check(float_num(0.0, 0.1, min_inclusive=False), epsilon, "epsilon")
    _check(float_num(0.0, min_inclusive=False), t_end, "t_end")
    return int(round(t_end / epsilon))


def _check_method(method: str) -> str:
    if method not in METHODS:
        raise ConfigError(f"unknown integration method {method!r}; expected one of {', '.join(METHODS)}")
    return method


@dataclass(frozen=True)
class MeanFieldState:
    theta_blue: float
    theta_red: float
    t: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.theta_blue <= 1.0 and 0.0 <= self.theta_red <= 1.0):
            raise ParameterError(f"prevalences must lie in [0, 1], got ({self.theta_blue}, {self.theta_red})")

    @property
    def gap(self) -> float:
        return abs(self.theta_blue - self.theta_red)


@dataclass(frozen=True)
class TwoPartyConfig:
    """
    Args:
        params: Model parameters
        r: Fraction of red nodes, in (0, 1)
        measure: Definition 1 or Definition 2
        theta0: Initial (theta_blue, theta_red)
        epsilon: Euler step in (0, 0.1]
        t_end: Horizon in model time units
    """

    params: ModelParams
    r: float
    measure: InfluenceMeasureKind = InfluenceMeasureKind.DEGREE_NORMALIZED_COUNT
    theta0: Tuple[float, float] = (0.5, 0.5)
    epsilon: float = DEFAULT_EPSILON
    t_end: float = DEFAULT_T_END

    def __post_init__(self):
        kind = InfluenceMeasureKind.parse(self.measure)
        if kind is InfluenceMeasureKind.MESSAGE_COUNT:
            raise ConfigError("mean-field dynamics are defined over users; use definition1 or definition2")
        object.__setattr__(self, "measure", kind)
        _check(open_fraction(), self.r, "r")
        theta0 = tuple(self.theta0)
        if len(theta0) != 2:
            raise ParameterError(f"theta0 needs two entries, got {len(theta0)}")
        for name, value in zip(("theta_blue0", "theta_red0"), theta0):
            _check(probability(), value, name)
        object.__setattr__(self, "theta0", (float(theta0[0]), float(theta0[1])))
        _check_horizon(self.epsilon, self.t_end)

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.epsilon))

    def initial_state(self) -> MeanFieldState:
        return MeanFieldState(self.theta0[0], self.theta0[1], 0.0)

    def replace(self, **changes) -> "TwoPartyConfig":
        values = {
            "params": self.params, "r": self.r, "measure": self.measure,
            "theta0": self.theta0, "epsilon": self.epsilon, "t_end": self.t_end,
        }
        values.update(changes)
        return TwoPartyConfig(**values)


def _drives(theta_blue, theta_red, params: ModelParams, r: float, kind: InfluenceMeasureKind):
    """Drive toward stance 1 for blue and red (scalars or arrays)."""
    net_blue = 2.0 * theta_blue - 1.0
    net_red = 2.0 * theta_red - 1.0
    if kind is InfluenceMeasureKind.DEGREE_NORMALIZED_COUNT:
        drive_blue = params.alpha * (1.0 - r) * net_blue - params.beta * r * net_red
        drive_red = params.alpha * r * net_red - params.beta * (1.0 - r) * net_blue
    else:
        drive_blue = params.alpha * net_blue - params.beta * net_red
        drive_red = params.alpha * net_red - params.beta * net_blue
    return drive_blue, drive_red


def two_party_rates(state: MeanFieldState, config: TwoPartyConfig) -> Tuple[float, float, float, float]:
    """
    Switching probabilities (p_blue_01, p_blue_10, p_red_01, p_red_10).
    """
    delta = config.params.delta
    drive_blue, drive_red = _drives(state.theta_blue, state.theta_red, config.params, config.r, config.measure)
    return (logistic(drive_blue - delta), logistic(-drive_blue - delta),
            logistic(drive_red - delta), logistic(-drive_red - delta))


def two_party_derivative(state: MeanFieldState, config: TwoPartyConfig) -> Tuple[float, float]:
    p_b01, p_b10, p_r01, p_r10 = two_party_rates(state, config)
    return ((1.0 - state.theta_blue) * p_b01 - state.theta_blue * p_b10,
            (1.0 - state.theta_red) * p_r01 - state.theta_red * p_r10)


def _clamp(value: float) -> Tuple[float, bool]:
    if value < 0.0:
        return 0.0, True
    if value > 1.0:
        return 1.0, True
    return value, False


def _integrate_two_party_euler(config: TwoPartyConfig) -> List[MeanFieldState]:
    eps = config.epsilon
    state = config.initial_state()
    states = [state]
    clamped = 0
    for k in range(1, config.n_steps + 1):
        d_blue, d_red = two_party_derivative(state, config)
        blue, hit_blue = _clamp(state.theta_blue + eps * d_blue)
        red, hit_red = _clamp(state.theta_red + eps * d_red)
        clamped += hit_blue + hit_red
        state = MeanFieldState(blue, red, k * eps)
        states.append(state)
    if clamped:
        logger.warning("clamped %d Euler overshoot(s) to [0, 1]", clamped)
    return states


def _integrate_two_party_rk45(config: TwoPartyConfig) -> List[MeanFieldState]:
    params, r, kind = config.params, config.r, config.measure
    grid = np.arange(config.n_steps + 1) * config.epsilon

    def rhs(_t, y):
        theta = np.clip(y, 0.0, 1.0)
        drive = np.array(_drives(theta[0], theta[1], params, r, kind))
        p01 = expit(drive - params.delta)
        p10 = expit(-drive - params.delta)
        return (1.0 - theta) * p01 - theta * p10

    solution = solve_ivp(rhs, (0.0, grid[-1]), list(config.theta0), method="RK45",
                         t_eval=grid, rtol=1e-8, atol=1e-10)
    if not solution.success:
        raise ConfigError(f"RK45 integration failed: {solution.message}")
    theta = np.clip(solution.y, 0.0, 1.0)
    return [MeanFieldState(float(b), float(rd), float(t)) for t, b, rd in zip(grid, theta[0], theta[1])]


def integrate_two_party(config: TwoPartyConfig, method: str = "euler") -> List[MeanFieldState]:
    """
    Integrate the two-party system from t=0 to ``config.t_end``.

    Returns ``n_steps + 1`` states at t = k * epsilon; the first is the
    initial condition. Euler is the reference scheme; ``"rk45"`` evaluates
    scipy's adaptive solution on the same grid.
    """
    if _check_method(method) == "rk45":
        return _integrate_two_party_rk45(config)
    return _integrate_two_party_euler(config)


def trajectory_frame(states: Sequence[MeanFieldState], days_per_unit: float = DAYS_PER_UNIT) -> pd.DataFrame:
    """Long format (t, days, group, theta); ``days`` is a display column only."""
    t = np.array([s.t for s in states])
    n = len(states)
    return pd.DataFrame({
        "t": np.tile(t, 2),
        "days": np.tile(t * days_per_unit, 2),
        "group": ["blue"] * n + ["red"] * n,
        "theta": [s.theta_blue for s in states] + [s.theta_red for s in states],
    })


# -- N-party system ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class EmotionMatrix:
    """
    Signed inter-group emotions for an N-party population.

    ``A[i, j]`` is the emotion of group i toward group j (the two-party
    system has ``A = [[alpha, -beta], [-beta, alpha]]``); ``r`` holds group
    sizes as fractions and ``delta`` the per-group inertia.
    """

    A: np.ndarray
    r: np.ndarray
    delta: np.ndarray
    labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
            raise ParameterError(f"emotion matrix must be square, got shape {A.shape}")
        if not np.isfinite(A).all():
            raise ParameterError("emotion matrix entries must be finite")
        n = A.shape[0]

        r = np.array(self.r, dtype=float)
        if r.shape != (n,):
            raise ParameterError(f"group sizes need {n} entries, got {r.size}")
        if (r <= 0).any() or abs(r.sum() - 1.0) > 1e-12:
            raise ParameterError(f"group sizes must be positive and sum to 1, got sum {r.sum()!r}")

        delta = np.broadcast_to(np.array(self.delta, dtype=float), (n,)).copy()
        if (delta < 0).any() or not np.isfinite(delta).all():
            raise ParameterError("inertia values must be finite and >= 0")

        labels = tuple(f"group{i}" for i in range(n)) if self.labels is None else tuple(self.labels)
        if len(labels) != n:
            raise ParameterError(f"need {n} group labels, got {len(labels)}")

        for name, value in (("A", A), ("r", r), ("delta", delta)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)
        object.__setattr__(self, "labels", labels)

    @property
    def n_groups(self) -> int:
        return self.A.shape[0]

    @classmethod
    def from_two_party(cls, params: ModelParams, r: float) -> "EmotionMatrix":
        """The two-party Definition-1 system written as an emotion matrix."""
        _check(open_fraction(), r, "r")
        A = [[params.alpha, -params.beta], [-params.beta, params.alpha]]
        return cls(A, [1.0 - r, r], [params.delta, params.delta], ("blue", "red"))

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "A": self.A.tolist(),
            "r": self.r.tolist(),
            "delta": self.delta.tolist(),
        }


@dataclass(frozen=True, eq=False)
class MultiPartyState:
    theta: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float)
        if theta.ndim != 1 or ((theta < 0) | (theta > 1)).any() or not np.isfinite(theta).all():
            raise ParameterError("multi-party prevalences must lie in [0, 1]")
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)


def multi_party_rates(state: MultiPartyState, em: EmotionMatrix) -> Tuple[np.ndarray, np.ndarray]:
    """(p01, p10) per group under the first influence measure."""
    if state.theta.shape != (em.n_groups,):
        raise ParameterError(f"state has {state.theta.size} groups, emotion matrix has {em.n_groups}")
    drive = em.A @ (em.r * (2.0 * state.theta - 1.0))
    return expit(drive - em.delta), expit(-drive - em.delta)


def multi_party_derivative(state: MultiPartyState, em: EmotionMatrix) -> np.ndarray:
    p01, p10 = multi_party_rates(state, em)
    return (1.0 - state.theta) * p01 - state.theta * p10


def integrate_multi_party(em: EmotionMatrix, theta0: Sequence[float], epsilon: float = DEFAULT_EPSILON,
                          t_end: float = DEFAULT_T_END) -> List[MultiPartyState]:
    """Clamped forward-Euler trajectory of the N-party system."""
    n_steps = _check_horizon(epsilon, t_end)
    state = MultiPartyState(theta0, 0.0)
    if state.theta.shape != (em.n_groups,):
        raise ParameterError(f"theta0 has {state.theta.size} entries, emotion matrix has {em.n_groups} groups")
    states = [state]
    clamped = 0
    for k in range(1, n_steps + 1):
        raw = state.theta + epsilon * multi_party_derivative(state, em)
        clamped += int(((raw < 0.0) | (raw > 1.0)).sum())
        state = MultiPartyState(np.clip(raw, 0.0, 1.0), k * epsilon)
        states.append(state)
    if clamped:
        logger.warning("clamped %d Euler overshoot(s) to [0, 1]", clamped)
    return states


def multi_party_frame(states: Sequence[MultiPartyState], labels: Sequence[str],
                      days_per_unit: float = DAYS_PER_UNIT) -> pd.DataFrame:
    """Long format (t, days, group, theta), one block of rows per group."""
    t = np.array([s.t for s in states])
    theta = np.vstack([s.theta for s in states])
    if theta.shape[1] != len(labels):
        raise ParameterError(f"need {theta.shape[1]} labels, got {len(labels)}")
    n = len(states)
    return pd.DataFrame({
        "t": np.tile(t, len(labels)),
        "days": np.tile(t * days_per_unit, len(labels)),
        "group": np.repeat(list(labels), n),
        "theta": theta.T.reshape(-1),
    })


def endpoint(states: Sequence[MeanFieldState]) -> Tuple[float, float]:
    last = states[-1]
    return last.theta_blue, last.theta_red


def theta_arrays(states: Sequence[MeanFieldState]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(t, theta_blue, theta_red) arrays of a two-party trajectory."""
    return (np.array([s.t for s in states]),
            np.array([s.theta_blue for s in states]),
            np.array([s.theta_red for s in states]))
