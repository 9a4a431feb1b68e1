"""
Run configuration: per-command schemas, JSON config files and CLI flags.

A :class:`RunConfig` is a command name plus a flat mapping of field values.
Each command declares an ordered schema of :class:`Field` entries; values
are resolved as

    schema default < config file < command-line flag

and validated field by field. Unknown keys are rejected so a typo in a
config file never silently falls back to a default.
"""

import argparse
import hashlib
import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence

from .errors import ConfigError
from .experiments import (
    FIVE_GROUP_LABELS,
    FIVE_GROUP_SIZES,
    HORSESHOE_A,
    HORSESHOE_DELTA,
    MULTIPARTY_START,
    SUITES,
)
from .validators import (
    Validator,
    choice,
    float_num,
    integer,
    matrix,
    open_fraction,
    probability,
    sequence,
)

logger = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "AFFPOL_OUTPUT_DIR"

KINDS = ("float", "int", "str", "bool", "choice", "floats", "strs", "matrix", "path")
MEASURES = ("definition1", "definition2")


@dataclass(frozen=True)
class Field:
    """
    One configuration key.

    Args:
        name: Key in config files (``--name-with-dashes`` on the command line)
        kind: One of :data:`KINDS`
        default: Value when neither file nor flag sets it (``None`` = unset)
        validator: Applied to every resolved value that is not ``None``
        help: One-line description for ``--help``
        output: Output location; excluded from the config hash and metadata
        required: A value must be supplied
        choices: Allowed values for ``choice`` fields
    """

    name: str
    kind: str
    default: Any = None
    validator: Optional[Validator] = None
    help: str = ""
    output: bool = False
    required: bool = False
    choices: Sequence[str] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @property
    def flag(self) -> str:
        return "--" + self.name.replace("_", "-")

    def coerce(self, value: Any) -> Any:
        """Normalize a JSON or flag value to this field's kind."""
        if value is None:
            return None
        try:
            if self.kind == "float":
                return _as_float(value)
            if self.kind == "int":
                if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                    raise ValueError
                return int(value)
            if self.kind == "bool":
                return _as_bool(value)
            if self.kind in ("str", "path", "choice"):
                if not isinstance(value, str):
                    raise ValueError
                return value
            if self.kind == "floats":
                return [_as_float(v) for v in _as_list(value)]
            if self.kind == "strs":
                return [str(v) for v in _as_list(value)]
            if self.kind == "matrix":
                if isinstance(value, str):
                    value = json.loads(value)
                return [[_as_float(v) for v in row] for row in value]
        except (TypeError, ValueError):
            pass
        raise ConfigError(f"{self.name}: expected a {self.kind} value, got {value!r}", field=self.name)

    def check(self, value: Any) -> None:
        if value is None:
            if self.required:
                raise ConfigError(f"{self.name} is required (set it in the config file or with {self.flag})",
                                  field=self.name)
            return
        validators = [choice(*self.choices)] if self.kind == "choice" else []
        if self.validator is not None:
            validators.append(self.validator)
        for validator in validators:
            result = validator.validate(value)
            if not result:
                raise ConfigError(f"{self.name}: {result.error_message}", field=self.name)


def _as_float(value: Any) -> float:
    if isinstance(value, bool):
        raise ValueError
    return float(value)


def _as_bool(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, str):
        lowered = value.strip().lower()
        if lowered in ("true", "yes", "1", "on"):
            return True
        if lowered in ("false", "no", "0", "off"):
            return False
    raise ValueError


def _as_list(value: Any) -> List[Any]:
    if isinstance(value, str):
        return [v for v in value.replace(",", " ").split() if v]
    return list(value)


# -- schemas -------------------------------------------------------------------

def _params(alpha: float, beta: float, delta: float) -> List[Field]:
    return [
        Field("alpha", "float", alpha, float_num(0.0), "in-group love"),
        Field("beta", "float", beta, float_num(), "out-group hate (negative needs --allow-negative-beta)"),
        Field("delta", "float", delta, float_num(0.0), "inertia"),
        Field("allow_negative_beta", "bool", False, None, "permit out-group love (beta < 0)"),
    ]


def _measure(default: str = "definition1", choices: Sequence[str] = MEASURES) -> Field:
    return Field("measure", "choice", default, None, "influence measure", choices=tuple(choices))


def _seed() -> Field:
    return Field("seed", "int", 0, integer(0), "RNG seed")


def _start(default: float) -> List[Field]:
    return [
        Field("theta_blue0", "float", default, probability(), "initial stance-1 share among blue nodes"),
        Field("theta_red0", "float", default, probability(), "initial stance-1 share among red nodes"),
    ]


def _horizon(t_end: float) -> List[Field]:
    return [
        Field("epsilon", "float", 0.01, float_num(0.0, 0.1, min_inclusive=False), "Euler step"),
        Field("t_end", "float", t_end, float_num(0.0, min_inclusive=False), "horizon in model time units"),
    ]


def _fit() -> List[Field]:
    return [
        Field("j_convention", "choice", "transition", None, "response coding", choices=("transition", "direction")),
        Field("ridge", "float", 0.0, float_num(0.0), "L2 penalty on the slopes"),
        Field("intercept_only", "bool", False, None, "fit delta alone"),
        Field("max_iter", "int", 100, integer(1), "Newton iteration limit"),
        Field("tol", "float", 1e-8, float_num(0.0, min_inclusive=False), "gradient tolerance"),
    ]


def _output(name: str, default: Optional[str], help_text: str) -> Field:
    return Field(name, "path", default, None, help_text, output=True)


SCHEMAS: Dict[str, List[Field]] = {
    "meanfield": [
        *_params(3.75, 0.25, 0.63),
        Field("r", "float", 0.18, open_fraction(), "fraction of red nodes"),
        _measure(),
        *_start(0.9),
        *_horizon(100.0),
        Field("method", "choice", "euler", None, "integrator", choices=("euler", "rk45")),
        Field("days_per_unit", "float", 7.0, float_num(0.0, min_inclusive=False), "display scale for the days column"),
        _output("output", "meanfield.csv", "trajectory CSV"),
    ],
    "multiparty": [
        Field("emotion", "matrix", [list(row) for row in HORSESHOE_A], matrix(1), "emotion matrix A (JSON rows)"),
        Field("sizes", "floats", list(FIVE_GROUP_SIZES), sequence(open_fraction(), min_length=1), "group sizes"),
        Field("inertia", "floats", [HORSESHOE_DELTA] * 5, sequence(float_num(0.0), min_length=1),
              "per-group inertia"),
        Field("labels", "strs", list(FIVE_GROUP_LABELS), sequence(min_length=1), "group labels"),
        Field("theta0", "floats", list(MULTIPARTY_START), sequence(probability(), min_length=1),
              "initial stance-1 shares"),
        *_horizon(100.0),
        Field("days_per_unit", "float", 7.0, float_num(0.0, min_inclusive=False), "display scale for the days column"),
        _output("output", "multiparty.csv", "trajectory CSV"),
    ],
    "simulate": [
        Field("edges", "path", None, None, "edge list CSV (complete graph when unset)"),
        Field("nodes", "path", None, None, "node attribute CSV (required with --edges)"),
        Field("n", "int", 2000, integer(2), "complete-graph size"),
        Field("r", "float", 0.3, probability(), "red fraction of the complete graph"),
        *_params(3.75, 0.25, 0.63),
        _measure(),
        *_start(0.9),
        Field("t_end", "float", 20.0, float_num(0.0, min_inclusive=False), "horizon in model time units"),
        Field("snapshots_per_unit", "int", 10, integer(1), "trajectory rows per model time unit"),
        Field("replicates", "int", 1, integer(1), "independent replicates"),
        Field("n_jobs", "int", 1, integer(-1), "parallel workers"),
        _seed(),
        _output("output", "simulate.csv", "trajectory CSV (all replicates)"),
        _output("mean_output", None, "ensemble-mean trajectory CSV"),
    ],
    "estimate": [
        Field("observations", "path", None, None, "Case-1 observation CSV", required=True),
        _measure(choices=MEASURES + ("messages",)),
        *_fit(),
        _output("output", "estimate.json", "estimation result JSON"),
    ],
    "panel-estimate": [
        Field("panel", "path", None, None, "stance panel CSV", required=True),
        Field("include_self", "bool", True, None, "count the focal node in its aggregate"),
        *_fit(),
        _output("output", "panel_estimate.json", "estimation result JSON"),
    ],
    "synth": [
        Field("graph", "choice", "complete", None, "graph family", choices=("complete", "two-block")),
        Field("n", "int", 2000, integer(2), "number of nodes"),
        Field("r", "float", 0.3, probability(), "fraction of red nodes"),
        Field("p_in", "float", 0.1, probability(), "within-party edge probability (two-block)"),
        Field("p_out", "float", 0.02, probability(), "cross-party edge probability (two-block)"),
        *_params(3.75, 0.25, 0.63),
        _measure(),
        *_start(0.9),
        Field("intervals", "int", 20, integer(1), "panel transitions"),
        Field("schedule", "choice", "synchronous", None, "update schedule", choices=("synchronous", "sweep")),
        Field("interval_days", "float", 7.0, float_num(0.0, min_inclusive=False), "days per interval (annotation)"),
        _seed(),
        _output("panel_output", "panel.csv", "stance panel CSV"),
        _output("edges_output", None, "edge list CSV"),
        _output("nodes_output", None, "node attribute CSV"),
        _output("observations_output", None, "Case-1 observation CSV"),
    ],
    "roundtrip": [
        Field("n", "int", 2000, integer(3), "complete-graph size"),
        Field("r", "float", 0.3, open_fraction(), "fraction of red nodes"),
        *_params(3.75, 0.25, 0.63),
        *_start(0.9),
        Field("intervals", "int", 20, integer(1), "panel transitions"),
        Field("schedule", "choice", "synchronous", None, "update schedule", choices=("synchronous", "sweep")),
        Field("include_self", "bool", False, None, "count the focal node in its aggregate"),
        Field("seeds", "int", 10, integer(1), "number of seeds"),
        Field("n_se", "float", 3.0, float_num(0.0, min_inclusive=False), "pass threshold in standard errors"),
        Field("n_jobs", "int", 1, integer(-1), "parallel workers"),
        _seed(),
        _output("output", "roundtrip.json", "recovery report JSON"),
    ],
    "sweep": [
        Field("alphas", "floats", [2.0, 5.0, 10.0, 20.0], sequence(float_num(0.0), min_length=1), "alpha grid"),
        Field("betas", "floats", [0.0, 0.5, 2.0, 5.0], sequence(float_num(), min_length=1), "beta grid"),
        Field("deltas", "floats", [0.0, 3.0], sequence(float_num(0.0), min_length=1), "delta grid"),
        Field("rs", "floats", [0.3, 0.5], sequence(open_fraction(), min_length=1), "red-fraction grid"),
        Field("allow_negative_beta", "bool", False, None, "permit out-group love (beta < 0)"),
        _measure(),
        *_start(0.8),
        *_horizon(100.0),
        Field("n_jobs", "int", 1, integer(-1), "parallel workers"),
        _output("output", "sweep.csv", "classification CSV"),
    ],
    "suite": [
        Field("suite", "choice", None, None, "suite id", required=True, choices=tuple(SUITES)),
        _output("output_dir", None, "directory for trajectories and summary (default: suite-<id>)"),
    ],
}

COMMANDS = tuple(SCHEMAS)


def schema(command: str) -> List[Field]:
    try:
        return SCHEMAS[command]
    except KeyError:
        raise ConfigError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}") from None


def output_fields(command: str) -> List[str]:
    return [f.name for f in schema(command) if f.output]


# -- RunConfig -----------------------------------------------------------------

def canonical_json(values: Mapping[str, Any]) -> str:
    return json.dumps(values, sort_keys=True, separators=(",", ":"))


class RunConfig:
    """A validated command configuration."""

    def __init__(self, command: str, values: Mapping[str, Any]):
        fields = {f.name: f for f in schema(command)}
        unknown = sorted(set(values) - set(fields))
        if unknown:
            raise ConfigError(
                f"unknown key(s) for '{command}': {', '.join(unknown)}; valid keys: {', '.join(fields)}",
                keys=unknown,
            )
        resolved = {}
        for name, spec in fields.items():
            value = spec.coerce(values[name] if name in values else spec.default)
            spec.check(value)
            resolved[name] = value
        self.command = command
        self._values = resolved

    def __getitem__(self, name: str) -> Any:
        return self._values[name]

    def get(self, name: str, default: Any = None) -> Any:
        return self._values.get(name, default)

    def to_dict(self) -> Dict[str, Any]:
        return dict(self._values)

    def inputs(self) -> Dict[str, Any]:
        """Every non-output field; what the metadata header records."""
        outputs = set(output_fields(self.command))
        return {k: v for k, v in self._values.items() if k not in outputs}

    def canonical_json(self) -> str:
        return canonical_json(self.inputs())

    @property
    def config_hash(self) -> str:
        payload = canonical_json({"command": self.command, "config": self.inputs()})
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]

    def replace(self, **changes: Any) -> "RunConfig":
        return RunConfig(self.command, {**self._values, **changes})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RunConfig):
            return NotImplemented
        return self.command == other.command and self._values == other._values

    __hash__ = None

    def __repr__(self) -> str:
        return f"RunConfig({self.command!r}, hash={self.config_hash})"


def load_config(path, command: Optional[str] = None) -> RunConfig:
    """
    Read a JSON config file.

    The file may name its command under ``"command"``; it must agree with
    ``command`` when both are given.
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}", path=str(path)) from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc.msg} (line {exc.lineno})",
                          path=str(path)) from None
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object", path=str(path))
    named = data.pop("command", None)
    if named is not None and command is not None and named != command:
        raise ConfigError(f"config file {path} is for '{named}', not '{command}'", path=str(path))
    command = command or named
    if command is None:
        raise ConfigError(f"config file {path} does not name its command", path=str(path))
    return RunConfig(command, data)


def save_config(config: RunConfig, path) -> Path:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(json.dumps({"command": config.command, **config.to_dict()}, indent=2, sort_keys=True))
        handle.write("\n")
    return path


def build_config(command: str, config_path=None, overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    """Resolve defaults, then the config file, then ``overrides`` (flags)."""
    values: Dict[str, Any] = {}
    if config_path is not None:
        values.update(load_config(config_path, command).to_dict())
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return RunConfig(command, values)


def resolve_output(path) -> Optional[Path]:
    """Relative output paths land under ``$AFFPOL_OUTPUT_DIR`` when it is set."""
    if path is None:
        return None
    path = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        return Path(base) / path
    return path


# -- argparse integration ------------------------------------------------------

def _bool_flag(text: str) -> bool:
    try:
        return _as_bool(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected true/false, got {text!r}") from None


def add_schema_arguments(parser: argparse.ArgumentParser, command: str) -> None:
    """One flag per schema field; unset flags stay out of the namespace."""
    group = parser.add_argument_group("configuration")
    for spec in schema(command):
        kwargs: Dict[str, Any] = {"dest": spec.name, "default": argparse.SUPPRESS}
        default = "" if spec.default is None else f" (default: {spec.default})"
        kwargs["help"] = spec.help + default
        if spec.kind == "float":
            kwargs["type"] = float
        elif spec.kind == "int":
            kwargs["type"] = int
        elif spec.kind == "bool":
            kwargs.update(type=_bool_flag, metavar="BOOL")
        elif spec.kind == "choice":
            kwargs["choices"] = list(spec.choices)
        elif spec.kind == "floats":
            kwargs.update(type=float, nargs="+")
        elif spec.kind == "strs":
            kwargs["nargs"] = "+"
        elif spec.kind == "matrix":
            kwargs["metavar"] = "JSON"
        group.add_argument(spec.flag, **kwargs)


def overrides_from_namespace(namespace: argparse.Namespace, command: str) -> Dict[str, Any]:
    names = {spec.name for spec in schema(command)}
    return {k: v for k, v in vars(namespace).items() if k in names}
