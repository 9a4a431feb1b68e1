"""
Regime suites: scripted scenarios integrated (or simulated), classified and
checked against their expected qualitative outcome.

Outcome classes (thresholds fixed per release):

- ``crossover``: the sign of theta_B - theta_R changes over the trajectory
  (both signs seen with magnitude above ``margin``)
- ``consensus``: final gap < 0.1 and both groups within 0.1 of the same
  extreme (detail ``pro`` or ``anti``)
- ``partisan-polarization``: final gap > 0.5 with the groups on opposite
  sides of 0.5
- ``non-partisan-split``: both groups within 0.05 of 0.5
- ``horseshoe`` (N parties): the two extreme groups agree within 0.1 and both
  differ from the moderate group by more than 0.5
- ``alignment`` (N parties): exactly one extreme lies within 0.1 of the
  moderate group while the other is more than 0.5 away
- ``other``: anything else

Crossover is tested first, so a trajectory that ends polarized after
swapping sides still reports ``crossover``.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from rich.console import Console
from rich.table import Table

from .core import BLUE, RED, InfluenceMeasureKind, ModelParams
from .errors import ConfigError, UnknownSuiteError
from .estimation import FitOptions, RecoveryReport, build_observations_case2, fit_logistic, recovery_report
from .formats import write_csv
from .meanfield import (
    DEFAULT_EPSILON,
    DEFAULT_T_END,
    EmotionMatrix,
    TwoPartyConfig,
    integrate_multi_party,
    integrate_two_party,
    multi_party_frame,
    theta_arrays,
    trajectory_frame,
)
from .network_sim import (
    InitialStanceSpec,
    SimConfig,
    complete_party_graph,
    run,
    simulate_panel,
)
from .themes import get_default_theme

logger = logging.getLogger(__name__)

CROSSOVER_MARGIN = 0.01
CONSENSUS_GAP = 0.1
EXTREME_TOLERANCE = 0.1
POLARIZED_GAP = 0.5
SPLIT_TOLERANCE = 0.05
EXTREMES_AGREE = 0.1
MODERATE_SPLIT = 0.5

OUTCOMES = (
    "consensus",
    "partisan-polarization",
    "non-partisan-split",
    "crossover",
    "horseshoe",
    "alignment",
    "other",
)


# -- classification ------------------------------------------------------------

def _common_extreme(values: Sequence[float]) -> Optional[str]:
    values = np.asarray(values, dtype=float)
    if (values >= 1.0 - EXTREME_TOLERANCE).all():
        return "pro"
    if (values <= EXTREME_TOLERANCE).all():
        return "anti"
    return None


def classify_two_party(theta_blue: Sequence[float], theta_red: Sequence[float],
                       margin: float = CROSSOVER_MARGIN) -> Tuple[str, str]:
    """
    Classify a two-party trajectory.

    Returns:
        (outcome, detail); ``detail`` names the shared extreme for
        consensus, the leading group for polarization and the final leader
        for crossover, and is empty otherwise
    """
    blue = np.asarray(theta_blue, dtype=float)
    red = np.asarray(theta_red, dtype=float)
    if blue.shape != red.shape or blue.size == 0:
        raise ConfigError("trajectories must be non-empty and of equal length")
    diff = blue - red
    end_blue, end_red = float(blue[-1]), float(red[-1])
    leader = "blue" if end_blue > end_red else "red"

    if (diff < -margin).any() and (diff > margin).any():
        return "crossover", leader
    gap = abs(end_blue - end_red)
    extreme = _common_extreme([end_blue, end_red])
    if gap < CONSENSUS_GAP and extreme is not None:
        return "consensus", extreme
    if gap > POLARIZED_GAP and (end_blue - 0.5) * (end_red - 0.5) < 0:
        return "partisan-polarization", leader
    if abs(end_blue - 0.5) <= SPLIT_TOLERANCE and abs(end_red - 0.5) <= SPLIT_TOLERANCE:
        return "non-partisan-split", ""
    return "other", ""


def classify_multi_party(theta_end: Sequence[float]) -> Tuple[str, str]:
    """
    Classify N-party endpoints ordered from one extreme to the other.

    The moderate group is the middle one (index N // 2).
    """
    theta = np.asarray(theta_end, dtype=float)
    if theta.size < 3:
        raise ConfigError("multi-party classification needs at least three groups")
    left, right, center = theta[0], theta[-1], theta[theta.size // 2]
    if abs(left - right) <= EXTREMES_AGREE and abs(left - center) > MODERATE_SPLIT \
            and abs(right - center) > MODERATE_SPLIT:
        return "horseshoe", "pro" if center < 0.5 else "anti"
    near_left = abs(left - center) <= EXTREMES_AGREE
    near_right = abs(right - center) <= EXTREMES_AGREE
    if near_left != near_right:
        far = abs(right - center) if near_left else abs(left - center)
        if far > MODERATE_SPLIT:
            return "alignment", "left" if near_left else "right"
    extreme = _common_extreme(theta)
    if extreme is not None and theta.max() - theta.min() < CONSENSUS_GAP:
        return "consensus", extreme
    if (np.abs(theta - 0.5) <= SPLIT_TOLERANCE).all():
        return "non-partisan-split", ""
    return "other", ""


# -- reports -------------------------------------------------------------------

@dataclass
class RegimeRecord:
    """One classified scenario; ``expected=None`` marks it informational."""

    suite: str
    scenario: str
    params: Dict[str, Any]
    theta_end: Tuple[float, ...]
    outcome: str
    detail: str = ""
    expected: Optional[str] = None
    provenance: str = ""

    @property
    def passed(self) -> Optional[bool]:
        if self.expected is None:
            return None
        return self.outcome == self.expected

    @property
    def gap(self) -> float:
        return float(max(self.theta_end) - min(self.theta_end))


@dataclass
class RegimeCheck:
    name: str
    passed: bool
    informational: bool = False


def _theta_cell(theta_end: Sequence[float], theme) -> str:
    text = [f"{v:.3f}" for v in theta_end]
    if len(text) == 2:
        text = [f"[{theme.get_style('party.blue')}]{text[0]}[/]", f"[{theme.get_style('party.red')}]{text[1]}[/]"]
    return ", ".join(text)


@dataclass
class RegimeReport:
    suite: str
    records: List[RegimeRecord] = field(default_factory=list)
    checks: List[RegimeCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        records_ok = all(r.passed is not False for r in self.records)
        checks_ok = all(c.passed for c in self.checks if not c.informational)
        return records_ok and checks_ok

    def record(self, scenario: str) -> RegimeRecord:
        for item in self.records:
            if item.scenario == scenario:
                return item
        raise KeyError(scenario)

    def add_check(self, name: str, passed: bool, informational: bool = False) -> None:
        self.checks.append(RegimeCheck(name, bool(passed), informational))

    def extend(self, other: "RegimeReport") -> None:
        self.records.extend(other.records)
        self.checks.extend(other.checks)

    def summary_frame(self) -> pd.DataFrame:
        rows = []
        for r in self.records:
            rows.append({
                "suite": r.suite,
                "scenario": r.scenario,
                "outcome": r.outcome,
                "detail": r.detail,
                "expected": r.expected or "",
                "passed": "" if r.passed is None else str(r.passed).lower(),
                "theta_end": ";".join(f"{v:.6f}" for v in r.theta_end),
                "params": json.dumps(r.params, sort_keys=True, separators=(",", ":")),
                "provenance": r.provenance,
            })
        return pd.DataFrame(rows, columns=["suite", "scenario", "outcome", "detail", "expected",
                                           "passed", "theta_end", "params", "provenance"])

    def checks_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [{"suite": self.suite, "check": c.name, "passed": str(c.passed).lower(),
              "informational": str(c.informational).lower()} for c in self.checks],
            columns=["suite", "check", "passed", "informational"],
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "records": self.summary_frame().to_dict(orient="records"),
            "checks": [{"name": c.name, "passed": c.passed, "informational": c.informational}
                       for c in self.checks],
        }

    def render(self, console: Optional[Console] = None) -> Table:
        """Rich table of records and checks; printed when ``console`` is given."""
        theme = get_default_theme()
        table = Table(title=f"Regime report: {self.suite}", title_style=theme.get_style("table.title"),
                      header_style=theme.get_style("table.header"), border_style=theme.get_style("table.border"))
        table.add_column("scenario")
        table.add_column("theta (end)", justify="right")
        table.add_column("outcome")
        table.add_column("expected")
        table.add_column("", justify="center")
        for r in self.records:
            outcome = f"[{theme.outcome_style(r.outcome)}]{r.outcome}[/]"
            if r.detail:
                outcome += f" ({r.detail})"
            if r.passed is None:
                mark = "[check.info]info[/]"
            else:
                mark = "[check.pass]pass[/]" if r.passed else "[check.fail]FAIL[/]"
            table.add_row(r.scenario, _theta_cell(r.theta_end, theme), outcome,
                          r.expected or "-", mark)
        for c in self.checks:
            if c.informational:
                mark = "[check.info]info[/]"
            else:
                mark = "[check.pass]pass[/]" if c.passed else "[check.fail]FAIL[/]"
            table.add_row(f"[muted]{c.name}[/]", "", "yes" if c.passed else "no", "", mark)
        if console is not None:
            console.print(table)
        return table


# -- scenario definitions ------------------------------------------------------

@dataclass(frozen=True)
class TwoPartyScenario:
    name: str
    params: ModelParams
    r: float
    theta0: Tuple[float, float]
    expected: Optional[str] = None
    measure: InfluenceMeasureKind = InfluenceMeasureKind.DEGREE_NORMALIZED_COUNT
    provenance: str = ""
    t_end: float = DEFAULT_T_END

    def config(self, epsilon: float = DEFAULT_EPSILON) -> TwoPartyConfig:
        return TwoPartyConfig(self.params, self.r, self.measure, self.theta0, epsilon, self.t_end)

    def describe(self) -> Dict[str, Any]:
        return {**self.params.to_dict(), "r": self.r, "theta0": list(self.theta0),
                "measure": str(self.measure), "t_end": self.t_end}


@dataclass(frozen=True)
class MultiPartyScenario:
    name: str
    emotion: EmotionMatrix
    theta0: Tuple[float, ...]
    expected: Optional[str] = None
    provenance: str = ""
    t_end: float = DEFAULT_T_END

    def describe(self) -> Dict[str, Any]:
        return {**self.emotion.to_dict(), "theta0": list(self.theta0), "t_end": self.t_end}


@dataclass(frozen=True)
class NetworkScenario:
    """Stochastic run on a complete graph, started at exact group fractions."""

    name: str
    params: ModelParams
    n: int
    r: float
    theta0: Tuple[float, float]
    expected: Optional[str] = None
    provenance: str = ""
    t_end: float = 100.0
    seed: int = 0
    margin: float = 0.05

    def describe(self) -> Dict[str, Any]:
        return {**self.params.to_dict(), "n": self.n, "r": self.r, "theta0": list(self.theta0),
                "t_end": self.t_end, "seed": self.seed}


@dataclass(frozen=True)
class IssueCalibration:
    """One calibrated (issue, population) row with its start state."""

    params: ModelParams
    r: float
    theta0: float


TRANSCRIBED = "transcribed from a published calibration"
CHOSEN = "chosen to realize the described regime"

FIG1_START = (0.8, 0.8)
FIG1 = (
    TwoPartyScenario("a", ModelParams(10, 2, 3), 0.3, FIG1_START, "partisan-polarization", provenance=CHOSEN),
    TwoPartyScenario("b", ModelParams(10, 0.5, 3), 0.3, FIG1_START, "consensus", provenance=CHOSEN),
    TwoPartyScenario("c", ModelParams(10, 2, 3), 0.5, FIG1_START, "consensus", provenance=CHOSEN),
    TwoPartyScenario("d", ModelParams(20, 4, 3), 0.3, FIG1_START, "consensus", provenance=CHOSEN),
    TwoPartyScenario("e", ModelParams(20, 4, 0), 0.3, FIG1_START, "partisan-polarization", provenance=CHOSEN),
)

FIG2 = (
    TwoPartyScenario("crossover", ModelParams(10, 5, 3), 0.2, (0.7, 0.9), "crossover", provenance=CHOSEN),
    TwoPartyScenario("consensus", ModelParams(10, 1, 3), 0.5, (0.9, 0.6), "consensus", provenance=CHOSEN),
    TwoPartyScenario("polarization", ModelParams(10, 5, 3), 0.3, (0.6, 0.4), "partisan-polarization",
                     provenance=CHOSEN),
)

DEFINITIONS = (
    TwoPartyScenario("definition1", ModelParams(10, 5, 3), 0.3, (0.8, 0.8), "partisan-polarization",
                     provenance=CHOSEN),
    TwoPartyScenario("definition2", ModelParams(10, 5, 3), 0.3, (0.8, 0.8), "consensus",
                     measure=InfluenceMeasureKind.GROUP_FRACTION, provenance=CHOSEN),
)

USER_CALIBRATIONS = {
    "masking": {
        "all-users": IssueCalibration(ModelParams(3.75, 0.25, 0.63), 0.18, 0.9),
        "partisans": IssueCalibration(ModelParams(5.11, 0.63, 0.28), 0.34, 0.9),
    },
    "lockdowns": {
        "all-users": IssueCalibration(ModelParams(3.76, 0.75, 0.91), 0.43, 0.7),
        "partisans": IssueCalibration(ModelParams(5.08, 1.05, 0.80), 0.49, 0.7),
    },
}

MESSAGE_CALIBRATIONS = {
    "masking": {
        "all-users": IssueCalibration(ModelParams(3.85, 0.08, 0.62), 0.18, 0.9),
        "partisans": IssueCalibration(ModelParams(5.27, 0.41, 0.28), 0.34, 0.9),
    },
    "lockdowns": {
        "all-users": IssueCalibration(ModelParams(3.80, 0.70, 0.78), 0.43, 0.7),
        "partisans": IssueCalibration(ModelParams(5.03, 1.22, 0.58), 0.49, 0.7),
    },
}

FIVE_GROUP_SIZES = (0.05, 0.25, 0.40, 0.25, 0.05)
FIVE_GROUP_LABELS = ("HL", "L", "I", "R", "HR")
HORSESHOE_A = (
    (10.0, 0.0, -15.0, 0.0, 0.0),
    (0.0, 10.0, 2.0, 0.0, 0.0),
    (-2.0, 2.0, 10.0, 2.0, -2.0),
    (0.0, 0.0, 2.0, 10.0, 0.0),
    (0.0, 0.0, -15.0, 0.0, 10.0),
)
HORSESHOE_DELTA = 4.0
ALIGNMENT_A = (
    (8.0, 2.0, 4.0, 0.0, -2.0),
    (0.0, 8.0, 4.0, 0.0, -2.0),
    (0.0, 2.0, 8.0, 2.0, 0.0),
    (0.0, 0.0, 4.0, 8.0, -2.0),
    (-6.0, -6.0, -12.0, -6.0, 8.0),
)
ALIGNMENT_DELTA = 2.0
MULTIPARTY_START = (0.7,) * 5


def horseshoe_matrix() -> EmotionMatrix:
    return EmotionMatrix(HORSESHOE_A, FIVE_GROUP_SIZES, [HORSESHOE_DELTA] * 5, FIVE_GROUP_LABELS)


def alignment_matrix() -> EmotionMatrix:
    return EmotionMatrix(ALIGNMENT_A, FIVE_GROUP_SIZES, [ALIGNMENT_DELTA] * 5, FIVE_GROUP_LABELS)


# -- running scenarios ---------------------------------------------------------

Trajectories = Dict[str, pd.DataFrame]


def run_two_party(suite: str, scenario: TwoPartyScenario, epsilon: float = DEFAULT_EPSILON
                  ) -> Tuple[RegimeRecord, pd.DataFrame, np.ndarray]:
    """Integrate and classify; also returns the blue-minus-red difference."""
    states = integrate_two_party(scenario.config(epsilon))
    _, blue, red = theta_arrays(states)
    outcome, detail = classify_two_party(blue, red)
    record = RegimeRecord(suite, scenario.name, scenario.describe(), (float(blue[-1]), float(red[-1])),
                          outcome, detail, scenario.expected, scenario.provenance)
    logger.info("%s/%s: %s %s", suite, scenario.name, outcome, detail)
    return record, trajectory_frame(states), blue - red


def run_multi_party(suite: str, scenario: MultiPartyScenario,
                    epsilon: float = DEFAULT_EPSILON) -> Tuple[RegimeRecord, pd.DataFrame]:
    states = integrate_multi_party(scenario.emotion, scenario.theta0, epsilon, scenario.t_end)
    theta_end = tuple(float(v) for v in states[-1].theta)
    outcome, detail = classify_multi_party(theta_end)
    record = RegimeRecord(suite, scenario.name, scenario.describe(), theta_end, outcome, detail,
                          scenario.expected, scenario.provenance)
    logger.info("%s/%s: %s %s", suite, scenario.name, outcome, detail)
    return record, multi_party_frame(states, scenario.emotion.labels)


def exact_fraction_stances(graph, theta_blue: float, theta_red: float) -> InitialStanceSpec:
    """Explicit start where each group holds stance 1 in round(theta * size) nodes."""
    stances = {}
    for group, theta in ((BLUE, theta_blue), (RED, theta_red)):
        members = [node for node, p in zip(graph.node_ids, graph.party) if p == group]
        ones = int(round(theta * len(members)))
        stances.update({node: int(k < ones) for k, node in enumerate(members)})
    return InitialStanceSpec.explicit(stances)


def run_network(suite: str, scenario: NetworkScenario) -> Tuple[RegimeRecord, pd.DataFrame]:
    graph = complete_party_graph(scenario.n, scenario.r)
    init = exact_fraction_stances(graph, *scenario.theta0)
    config = SimConfig.for_time(scenario.params, InfluenceMeasureKind.DEGREE_NORMALIZED_COUNT, graph.n_nodes,
                                scenario.t_end, 10, scenario.seed, init)
    trajectory = run(graph, config)
    outcome, detail = classify_two_party(trajectory.theta_blue, trajectory.theta_red, margin=scenario.margin)
    theta_end = (float(trajectory.theta_blue[-1]), float(trajectory.theta_red[-1]))
    record = RegimeRecord(suite, scenario.name, scenario.describe(), theta_end, outcome, detail,
                          scenario.expected, scenario.provenance)
    return record, trajectory.to_frame()


def _calibration_scenario(name: str, calibration: IssueCalibration, expected: Optional[str] = None,
                          beta: Optional[float] = None, alpha: Optional[float] = None) -> TwoPartyScenario:
    params = calibration.params
    changes = {}
    if beta is not None:
        changes.update(beta=beta, allow_negative_beta=beta < 0)
    if alpha is not None:
        changes["alpha"] = alpha
    if changes:
        params = params.replace(**changes)
    theta0 = (calibration.theta0, calibration.theta0)
    return TwoPartyScenario(name, params, calibration.r, theta0, expected, provenance=TRANSCRIBED)


def _two_party_suite(suite: str, scenarios: Sequence[TwoPartyScenario]) -> Tuple[RegimeReport, Trajectories, Dict]:
    report = RegimeReport(suite)
    trajectories: Trajectories = {}
    diffs = {}
    for scenario in scenarios:
        record, frame, diff = run_two_party(suite, scenario)
        report.records.append(record)
        trajectories[scenario.name] = frame
        diffs[scenario.name] = diff
    return report, trajectories, diffs


def _fig1() -> Tuple[RegimeReport, Trajectories]:
    report, trajectories, _ = _two_party_suite("fig1", FIG1)
    a, b, d = report.record("a"), report.record("b"), report.record("d")
    report.add_check("lower out-group hate turns polarization into consensus",
                     a.outcome == "partisan-polarization" and b.outcome == "consensus")
    report.add_check("same alpha/beta ratio at a different scale changes the outcome", a.outcome != d.outcome)
    return report, trajectories


def _fig2() -> Tuple[RegimeReport, Trajectories]:
    report, trajectories, _ = _two_party_suite("fig2", FIG2)
    return report, trajectories


def _definitions() -> Tuple[RegimeReport, Trajectories]:
    report, trajectories, diffs = _two_party_suite("definitions", DEFINITIONS)
    report.add_check("definition 2 with equal starts keeps both groups identical",
                     float(np.max(np.abs(diffs["definition2"]))) <= 1e-12)
    return report, trajectories


def _calibration_suite(suite: str, calibrations: Mapping[str, Mapping[str, IssueCalibration]]
                       ) -> Tuple[RegimeReport, Trajectories, Callable[[str], float]]:
    scenarios = [
        _calibration_scenario(f"{issue}-{population}", calibration)
        for issue, rows in calibrations.items()
        for population, calibration in rows.items()
    ]
    report, trajectories, _ = _two_party_suite(suite, scenarios)

    def lead(name: str) -> float:
        blue, red = report.record(name).theta_end
        return blue - red

    return report, trajectories, lead


def _table1() -> Tuple[RegimeReport, Trajectories]:
    report, trajectories, lead = _calibration_suite("table1-trajectories", USER_CALIBRATIONS)
    report.add_check("masking all-users: blue leads by more than 0.1", lead("masking-all-users") > 0.1)
    report.add_check("lockdowns all-users: blue leads by more than 0.1", lead("lockdowns-all-users") > 0.1)
    report.add_check("masking: partisans end with a larger gap than all users",
                     report.record("masking-partisans").gap > report.record("masking-all-users").gap)
    report.add_check("lockdowns: partisans end with a larger gap than all users",
                     report.record("lockdowns-partisans").gap > report.record("lockdowns-all-users").gap,
                     informational=True)
    return report, trajectories


def _table3() -> Tuple[RegimeReport, Trajectories]:
    report, trajectories, lead = _calibration_suite("table3-trajectories", MESSAGE_CALIBRATIONS)
    for name in ("masking-all-users", "masking-partisans", "lockdowns-all-users"):
        report.add_check(f"{name}: blue ends above red", lead(name) > 0)
    report.add_check("lockdowns-partisans: blue ends above red", lead("lockdowns-partisans") > 0,
                     informational=True)
    return report, trajectories


def default_beta_grid(alpha: float, beta_estimate: float) -> List[float]:
    return [-alpha, -alpha / 2.0, 0.0, beta_estimate, alpha / 2.0, alpha]


def _beta_label(beta: float) -> str:
    return f"beta={beta:g}"


def outgroup_sweep(issue_params: IssueCalibration, beta_grid: Optional[Sequence[float]] = None,
                   suite: str = "outgroup", include_null_alpha: bool = True
                   ) -> Tuple[RegimeReport, Trajectories]:
    """
    Vary beta at fixed alpha, delta, r and start state.

    ``beta = -alpha`` (out-group love) is expected to reach consensus; with
    ``include_null_alpha`` an extra scenario drops in-group love entirely and
    is expected to settle at the non-partisan split.
    """
    alpha, beta_est = issue_params.params.alpha, issue_params.params.beta
    grid = list(default_beta_grid(alpha, beta_est) if beta_grid is None else beta_grid)
    if not grid or not all(np.isfinite(grid)):
        raise ConfigError("beta grid must hold finite values")

    scenarios = []
    for beta in grid:
        expected = "consensus" if beta == -alpha else None
        scenarios.append(_calibration_scenario(_beta_label(beta), issue_params, expected, beta=beta))
    if include_null_alpha:
        scenarios.append(_calibration_scenario("alpha=0", issue_params, "non-partisan-split", alpha=0.0))
    report, trajectories, _ = _two_party_suite(suite, scenarios)

    labels = {beta: _beta_label(beta) for beta in grid}
    if 0.0 in labels and beta_est in labels:
        zero, estimated = report.record(labels[0.0]), report.record(labels[beta_est])
        report.add_check("beta=0 shows no crossover", zero.outcome != "crossover")
        report.add_check("beta=0 ends with a smaller gap than the estimated beta", zero.gap < estimated.gap)
    if -alpha in labels:
        report.add_check("beta=-alpha converges pro", report.record(labels[-alpha]).detail == "pro")
    if include_null_alpha:
        end = report.record("alpha=0").theta_end
        report.add_check("alpha=0 converges to 0.5 within 0.01", all(abs(v - 0.5) <= 0.01 for v in end))
    return report, trajectories


def _outgroup(issue: str) -> Callable[[], Tuple[RegimeReport, Trajectories]]:
    def suite() -> Tuple[RegimeReport, Trajectories]:
        return outgroup_sweep(USER_CALIBRATIONS[issue]["all-users"], suite=f"outgroup-{issue}")
    return suite


def _multiparty() -> Tuple[RegimeReport, Trajectories]:
    report = RegimeReport("multiparty")
    trajectories: Trajectories = {}
    scenarios = (
        MultiPartyScenario("horseshoe", horseshoe_matrix(), MULTIPARTY_START, "horseshoe", CHOSEN),
        MultiPartyScenario("alignment", alignment_matrix(), MULTIPARTY_START, "alignment", CHOSEN),
    )
    for scenario in scenarios:
        record, frame = run_multi_party("multiparty", scenario)
        report.records.append(record)
        trajectories[scenario.name] = frame
    return report, trajectories


def _network() -> Tuple[RegimeReport, Trajectories]:
    report = RegimeReport("network")
    scenario = NetworkScenario("complete-400", FIG1[0].params, 400, FIG1[0].r, FIG1_START,
                               "partisan-polarization", provenance=CHOSEN)
    record, frame = run_network("network", scenario)
    report.records.append(record)
    mean_field, mf_frame, _ = run_two_party("network", FIG1[0])
    report.add_check("stochastic outcome matches the mean-field outcome", record.outcome == mean_field.outcome)
    return report, {scenario.name: frame, "mean-field": mf_frame}


SUITES: Dict[str, Callable[[], Tuple[RegimeReport, Trajectories]]] = {
    "fig1": _fig1,
    "fig2": _fig2,
    "definitions": _definitions,
    "table1-trajectories": _table1,
    "table3-trajectories": _table3,
    "outgroup-masking": _outgroup("masking"),
    "outgroup-lockdowns": _outgroup("lockdowns"),
    "multiparty": _multiparty,
    "network": _network,
}


def run_figure_suite(suite_id: str, output_dir: Optional[Path] = None,
                     metadata: Optional[Mapping[str, Any]] = None) -> RegimeReport:
    """
    Run a named suite; with ``output_dir`` write one trajectory CSV per
    scenario plus ``summary.csv`` and ``checks.csv``.

    Raises:
        UnknownSuiteError: ``suite_id`` is not a known suite
    """
    try:
        runner = SUITES[suite_id]
    except KeyError:
        raise UnknownSuiteError(f"unknown suite {suite_id!r}; expected one of {', '.join(SUITES)}",
                                suite=suite_id) from None
    report, trajectories = runner()
    if output_dir is not None:
        output_dir = Path(output_dir)
        for name, frame in trajectories.items():
            write_csv(frame, output_dir / f"{name}.csv", metadata)
        write_csv(report.summary_frame(), output_dir / "summary.csv", metadata)
        write_csv(report.checks_frame(), output_dir / "checks.csv", metadata)
    status = "passed" if report.passed else "FAILED"
    logger.info("suite %s %s (%d scenarios, %d checks)", suite_id, status, len(report.records), len(report.checks))
    return report


# -- sweeps and recovery -------------------------------------------------------

def _sweep_cell(params: ModelParams, r: float, theta0: Tuple[float, float], measure: InfluenceMeasureKind,
                epsilon: float, t_end: float) -> Dict[str, Any]:
    states = integrate_two_party(TwoPartyConfig(params, r, measure, theta0, epsilon, t_end))
    _, blue, red = theta_arrays(states)
    outcome, detail = classify_two_party(blue, red)
    return {
        **params.to_dict(), "r": r,
        "theta_blue_end": float(blue[-1]), "theta_red_end": float(red[-1]),
        "gap": float(abs(blue[-1] - red[-1])), "outcome": outcome, "detail": detail,
    }


def parameter_sweep(alphas: Sequence[float], betas: Sequence[float], deltas: Sequence[float],
                    rs: Sequence[float], theta0: Tuple[float, float] = (0.8, 0.8), measure="definition1",
                    epsilon: float = DEFAULT_EPSILON, t_end: float = DEFAULT_T_END, n_jobs: int = 1,
                    allow_negative_beta: bool = False) -> pd.DataFrame:
    """
    Mean-field endpoint classification over the alpha x beta x delta x r grid.

    Rows come back in grid order whatever ``n_jobs`` is.
    """
    kind = InfluenceMeasureKind.parse(measure)
    cells = [
        ModelParams(a, b, d, allow_negative_beta=allow_negative_beta)
        for a in alphas for b in betas for d in deltas
    ]
    jobs = [(params, r) for params in cells for r in rs]
    if not jobs:
        raise ConfigError("sweep grid is empty")
    logger.info("sweeping %d grid cell(s) on %d worker(s)", len(jobs), n_jobs)
    rows = Parallel(n_jobs=n_jobs)(
        delayed(_sweep_cell)(params, r, tuple(theta0), kind, epsilon, t_end) for params, r in jobs
    )
    return pd.DataFrame(rows, columns=["alpha", "beta", "delta", "r", "theta_blue_end", "theta_red_end",
                                       "gap", "outcome", "detail"])


def _roundtrip_fit(graph, truth: ModelParams, intervals: int, seed: int, init: InitialStanceSpec,
                   schedule: str, include_self: bool, options: FitOptions):
    synthetic = simulate_panel(graph, truth, InfluenceMeasureKind.DEGREE_NORMALIZED_COUNT, intervals, seed,
                               init, schedule=schedule)
    observations = build_observations_case2(synthetic.panel, include_self=include_self)
    return fit_logistic(observations, options, measure="definition1", metadata={"seed": seed})


def run_roundtrip(truth: ModelParams, n: int = 2000, r: float = 0.3, theta0: Tuple[float, float] = (0.9, 0.9),
                  intervals: int = 20, schedule: str = "synchronous", include_self: bool = False,
                  n_seeds: int = 10, seed: int = 0, n_jobs: int = 1, n_se: float = 3.0,
                  options: Optional[FitOptions] = None) -> RecoveryReport:
    """
    Synthesize panels with known parameters, refit them from the panel
    alone and report per-seed recovery.

    Seeds are ``seed, seed + 1, ...``; each seed's panel comes from its own
    stream, so results do not depend on ``n_jobs``.
    """
    if n_seeds < 1:
        raise ConfigError(f"n_seeds must be >= 1, got {n_seeds}")
    graph = complete_party_graph(n, r)
    init = InitialStanceSpec.bernoulli(*theta0)
    options = options or FitOptions()
    seeds = [seed + k for k in range(n_seeds)]
    results = Parallel(n_jobs=n_jobs)(
        delayed(_roundtrip_fit)(graph, truth, intervals, s, init, schedule, include_self, options) for s in seeds
    )
    report = recovery_report(truth, dict(zip(seeds, results)), n_se)
    logger.info("round trip: %d of %d seed(s) within %g SE", report.pass_count, n_seeds, n_se)
    return report
