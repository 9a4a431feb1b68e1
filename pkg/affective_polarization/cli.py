"""
Command-line entry point (``affpol``).

Every subcommand resolves a :class:`~.config.RunConfig`, runs, and writes
its outputs with a metadata header that is enough to re-run it
(``affpol rerun FILE --output PATH``). Errors are reported as one JSON line
on stderr and mapped to the exit codes in :mod:`.errors`.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import pandas as pd
from rich.table import Table

from .config import (
    COMMANDS,
    RunConfig,
    add_schema_arguments,
    build_config,
    output_fields,
    overrides_from_namespace,
    resolve_output,
    save_config,
)
from .console import configure_logging, get_console
from .core import ModelParams
from .errors import ConfigError, GraphFormatError, PolarizationError
from .estimation import (
    EstimationResult,
    FitOptions,
    build_observations_case1,
    build_observations_case2,
    fit_logistic,
    panel_interval_summary,
)
from .experiments import classify_multi_party, classify_two_party, parameter_sweep, run_figure_suite, run_roundtrip
from .formats import (
    build_metadata,
    graph_frames,
    load_graph,
    load_observations,
    load_panel,
    read_metadata,
    save_panel,
    write_csv,
    write_json,
)
from .meanfield import (
    EmotionMatrix,
    TwoPartyConfig,
    integrate_multi_party,
    integrate_two_party,
    multi_party_frame,
    theta_arrays,
    trajectory_frame,
)
from .network_sim import (
    RNG_ALGORITHM,
    InitialStanceSpec,
    SimConfig,
    complete_party_graph,
    ensemble_mean,
    ensemble_run,
    simulate_panel,
    two_block_graph,
)
from .themes import get_default_theme

logger = logging.getLogger(__name__)

STOCHASTIC = ("simulate", "synth", "roundtrip")

DESCRIPTIONS = {
    "simulate": "stochastic simulation on a loaded or complete graph",
    "meanfield": "integrate the two-party mean-field dynamics",
    "multiparty": "integrate the N-party mean-field dynamics",
    "estimate": "fit (alpha, beta, delta) from observed influences (Case 1)",
    "panel-estimate": "fit (alpha, beta, delta) from a stance panel (Case 2)",
    "synth": "generate a synthetic graph and stance panel with known parameters",
    "roundtrip": "synthesize panels, refit and report parameter recovery",
    "sweep": "classify mean-field endpoints over a parameter grid",
    "suite": "run a regime suite and write its report",
}


def _metadata(config: RunConfig, artifact: str, **extra: Any) -> Dict[str, Any]:
    return build_metadata(
        config.command,
        config.config_hash,
        config.canonical_json(),
        seed=config.get("seed"),
        measure=config.get("measure"),
        rng=RNG_ALGORITHM if config.command in STOCHASTIC else None,
        artifact=artifact,
        **extra,
    )


def _params(config: RunConfig) -> ModelParams:
    return ModelParams(config["alpha"], config["beta"], config["delta"],
                       allow_negative_beta=config["allow_negative_beta"])


def _output(config: RunConfig, name: str) -> Optional[Path]:
    return resolve_output(config[name])


# -- commands ------------------------------------------------------------------

def cmd_meanfield(config: RunConfig) -> int:
    two_party = TwoPartyConfig(_params(config), config["r"], config["measure"],
                               (config["theta_blue0"], config["theta_red0"]), config["epsilon"], config["t_end"])
    states = integrate_two_party(two_party, method=config["method"])
    path = _output(config, "output")
    if path is not None:
        write_csv(trajectory_frame(states, config["days_per_unit"]), path, _metadata(config, "output"))
    _, blue, red = theta_arrays(states)
    outcome, detail = classify_two_party(blue, red)
    get_console().print(
        f"theta_blue(T) = {blue[-1]:.4f}, theta_red(T) = {red[-1]:.4f}: "
        f"[{get_default_theme().outcome_style(outcome)}]{outcome}[/] {detail}".rstrip()
    )
    return 0


def cmd_multiparty(config: RunConfig) -> int:
    emotion = EmotionMatrix(config["emotion"], config["sizes"], config["inertia"], config["labels"])
    states = integrate_multi_party(emotion, config["theta0"], config["epsilon"], config["t_end"])
    path = _output(config, "output")
    if path is not None:
        write_csv(multi_party_frame(states, emotion.labels, config["days_per_unit"]), path,
                  _metadata(config, "output"))
    theta_end = states[-1].theta
    summary = ", ".join(f"{label}={value:.4f}" for label, value in zip(emotion.labels, theta_end))
    if emotion.n_groups >= 3:
        outcome, detail = classify_multi_party(theta_end)
        summary += f": [{get_default_theme().outcome_style(outcome)}]{outcome}[/] {detail}"
    get_console().print(summary.rstrip())
    return 0


def cmd_simulate(config: RunConfig) -> int:
    if config["edges"] is not None:
        if config["nodes"] is None:
            raise ConfigError("--nodes is required with --edges")
        graph = load_graph(config["edges"], config["nodes"])
    else:
        graph = complete_party_graph(config["n"], config["r"])
    if graph.stances_initialized:
        init = InitialStanceSpec.explicit(graph.stances())
    else:
        init = InitialStanceSpec.bernoulli(config["theta_blue0"], config["theta_red0"])
    sim_config = SimConfig.for_time(_params(config), config["measure"], graph.n_nodes, config["t_end"],
                                    config["snapshots_per_unit"], config["seed"], init)
    with get_console().status(f"simulating {config['replicates']} replicate(s)"):
        trajectories = ensemble_run(graph, sim_config, config["replicates"], n_jobs=config["n_jobs"])

    path = _output(config, "output")
    if path is not None:
        frame = pd.concat([t.to_frame() for t in trajectories], ignore_index=True)
        write_csv(frame, path, _metadata(config, "output"))
    mean_path = _output(config, "mean_output")
    if mean_path is not None:
        write_csv(ensemble_mean(trajectories).to_frame(), mean_path, _metadata(config, "mean_output"))
    return 0


def _fit_options(config: RunConfig) -> FitOptions:
    return FitOptions(max_iter=config["max_iter"], tol=config["tol"], ridge=config["ridge"],
                      intercept_only=config["intercept_only"])


def _estimate_table(result: EstimationResult) -> Table:
    theme = get_default_theme()
    table = Table(title="Estimates", title_style=theme.get_style("table.title"),
                  header_style=theme.get_style("table.header"), border_style=theme.get_style("table.border"))
    table.add_column("parameter")
    table.add_column("estimate", justify="right", style=theme.get_style("estimate"))
    table.add_column("std. error", justify="right")
    for name, value, se in zip(("alpha", "beta", "delta"), result.estimates, result.std_errors):
        table.add_row(name, f"{value:.4f}", f"{se:.4f}")
    table.caption = (f"n = {result.n_obs}, pseudo-R2 = {result.pseudo_r2:.4f}, "
                     f"{'converged' if result.converged else 'NOT converged'} in {result.iterations} iteration(s)")
    return table


def cmd_estimate(config: RunConfig) -> int:
    records = load_observations(config["observations"])
    observations = build_observations_case1(records, config["j_convention"])
    metadata = _metadata(config, "output")
    result = fit_logistic(observations, _fit_options(config), measure=config["measure"],
                          j_convention=config["j_convention"], metadata=metadata)
    path = _output(config, "output")
    if path is not None:
        write_json(result.to_dict(), path)
    get_console().print(_estimate_table(result))
    return 0


def cmd_panel_estimate(config: RunConfig) -> int:
    panel = load_panel(config["panel"])
    summary = panel_interval_summary(panel)
    if summary["pairs_skipped"]:
        logger.warning("%d interval pair(s) share no nodes", summary["pairs_skipped"])
    observations = build_observations_case2(panel, include_self=config["include_self"],
                                            j_convention=config["j_convention"])
    metadata = _metadata(config, "output", pairs_used=summary["pairs_used"],
                         pairs_skipped=summary["pairs_skipped"])
    result = fit_logistic(observations, _fit_options(config), measure="definition1",
                          j_convention=config["j_convention"], metadata=metadata)
    path = _output(config, "output")
    if path is not None:
        payload = result.to_dict()
        payload["panel"] = summary
        write_json(payload, path)
    get_console().print(_estimate_table(result))
    return 0


def cmd_synth(config: RunConfig) -> int:
    if config["graph"] == "two-block":
        graph = two_block_graph(config["n"], config["r"], config["p_in"], config["p_out"], seed=config["seed"])
    else:
        graph = complete_party_graph(config["n"], config["r"])
    init = InitialStanceSpec.bernoulli(config["theta_blue0"], config["theta_red0"])
    synthetic = simulate_panel(graph, _params(config), config["measure"], config["intervals"], config["seed"],
                               init, schedule=config["schedule"], interval_days=config["interval_days"])

    path = _output(config, "panel_output")
    if path is not None:
        save_panel(synthetic.panel, path, _metadata(config, "panel_output"))
    edges, attrs = graph_frames(graph)
    for name, frame in (("edges_output", edges), ("nodes_output", attrs),
                        ("observations_output", synthetic.observation_frame())):
        path = _output(config, name)
        if path is not None:
            write_csv(frame, path, _metadata(config, name))
    return 0


def cmd_roundtrip(config: RunConfig) -> int:
    truth = _params(config)
    with get_console().status(f"round trip over {config['seeds']} seed(s)"):
        report = run_roundtrip(
            truth, n=config["n"], r=config["r"], theta0=(config["theta_blue0"], config["theta_red0"]),
            intervals=config["intervals"], schedule=config["schedule"], include_self=config["include_self"],
            n_seeds=config["seeds"], seed=config["seed"], n_jobs=config["n_jobs"], n_se=config["n_se"],
        )
    path = _output(config, "output")
    if path is not None:
        payload = report.to_dict()
        payload["metadata"] = _metadata(config, "output")
        write_json(payload, path)
    get_console().print(f"{report.pass_count} of {len(report.records)} seed(s) within {report.n_se:g} SE of truth")
    return 0


def cmd_sweep(config: RunConfig) -> int:
    with get_console().status("sweeping parameter grid"):
        frame = parameter_sweep(
            config["alphas"], config["betas"], config["deltas"], config["rs"],
            theta0=(config["theta_blue0"], config["theta_red0"]), measure=config["measure"],
            epsilon=config["epsilon"], t_end=config["t_end"], n_jobs=config["n_jobs"],
            allow_negative_beta=config["allow_negative_beta"],
        )
    path = _output(config, "output")
    if path is not None:
        write_csv(frame, path, _metadata(config, "output"))
    counts = frame["outcome"].value_counts().sort_index()
    get_console().print(", ".join(f"{outcome}: {count}" for outcome, count in counts.items()))
    return 0


def cmd_suite(config: RunConfig) -> int:
    suite_id = config["suite"]
    output_dir = resolve_output(config["output_dir"] or f"suite-{suite_id}")
    report = run_figure_suite(suite_id, output_dir, _metadata(config, "output_dir"))
    report.render(get_console())
    if not report.passed:
        logger.warning("suite %s has failing scenarios or checks; see %s", suite_id, output_dir / "summary.csv")
    return 0


HANDLERS: Dict[str, Callable[[RunConfig], int]] = {
    "simulate": cmd_simulate,
    "meanfield": cmd_meanfield,
    "multiparty": cmd_multiparty,
    "estimate": cmd_estimate,
    "panel-estimate": cmd_panel_estimate,
    "synth": cmd_synth,
    "roundtrip": cmd_roundtrip,
    "sweep": cmd_sweep,
    "suite": cmd_suite,
}


# -- rerun ---------------------------------------------------------------------

def _file_metadata(path: Path) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as handle:
        head = handle.read(1)
    if head == "{":
        with open(path, "r", encoding="utf-8") as handle:
            return dict(json.load(handle).get("metadata") or {})
    return read_metadata(path)


def rerun_config(path, output) -> RunConfig:
    """
    Rebuild the configuration recorded in ``path`` so that it writes only the
    same artifact, to ``output``.
    """
    path = Path(path)
    if not path.exists():
        raise GraphFormatError("file not found", path=str(path))
    metadata = _file_metadata(path)
    missing = [key for key in ("command", "config", "artifact") if key not in metadata]
    if missing:
        raise ConfigError(f"{path} has no run metadata ({', '.join(missing)} missing)", path=str(path))
    command = metadata["command"]
    values = json.loads(metadata["config"])
    for name in output_fields(command):
        values[name] = None
    values[metadata["artifact"]] = str(output)
    config = RunConfig(command, values)
    if metadata.get("config_hash") not in (None, config.config_hash):
        logger.warning("config hash differs from the recorded one (%s vs %s)",
                       config.config_hash, metadata["config_hash"])
    from . import __version__

    if metadata.get("version") not in (None, __version__):
        logger.warning("file was written by version %s, running %s", metadata["version"], __version__)
    return config


# -- argument parsing ----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    from . import __version__

    parser = argparse.ArgumentParser(
        prog="affpol",
        description="Affective-polarization dynamics: simulation, mean-field integration and estimation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (-vv for debug)")
    parser.add_argument("-q", "--quiet", action="store_true", help="only log errors")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True

    for command in COMMANDS:
        sub = subparsers.add_parser(command, help=DESCRIPTIONS[command], description=DESCRIPTIONS[command])
        sub.add_argument("--config", metavar="PATH", help="JSON config file (flags override it)")
        sub.add_argument("--write-config", metavar="PATH", help="save the resolved config as JSON")
        add_schema_arguments(sub, command)

    rerun = subparsers.add_parser("rerun", help="re-execute the run recorded in an output file's metadata")
    rerun.add_argument("file", help="CSV or JSON output written by affpol")
    rerun.add_argument("--output", required=True, metavar="PATH",
                       help="where to write the regenerated artifact (a directory for suite outputs)")
    return parser


def _report_error(error: PolarizationError) -> None:
    print(json.dumps(error.to_dict(), default=str), file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI; returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

    configure_logging(-1 if args.quiet else args.verbose)
    try:
        if args.command == "rerun":
            config = rerun_config(args.file, args.output)
        else:
            config = build_config(args.command, args.config, overrides_from_namespace(args, args.command))
            if args.write_config:
                save_config(config, resolve_output(args.write_config))
        logger.info("running %s (config %s)", config.command, config.config_hash)
        return HANDLERS[config.command](config)
    except PolarizationError as error:
        logger.debug("command failed", exc_info=True)
        _report_error(error)
        return error.exit_code
    except Exception as error:
        logger.debug("unexpected failure", exc_info=True)
        print(json.dumps({"error": "internal", "message": str(error)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
