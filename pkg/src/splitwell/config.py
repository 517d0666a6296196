"""Scenario configuration: JSON schema, loading, and validation.

A configuration document (schema_version 1) looks like

    {
      "schema_version": 1,
      "label": "paper_baseline",
      "geometry": {"x_left": 0.0, "width": 1.0, "mass": 1.0, "hbar": 1.0},
      "states": {
        "a": [[2, 1.0]],
        "b": [[1, 1.0], [2, 1.0]]
      },
      "prior": 0.5,
      "insertion_point": 0.5,
      "n_cut": 2048,
      "signal": {"variant": "binary_detector",
                 "false_positive": 0.1, "false_negative": 0.1},
      "sweep": {"xi": [...], "epsilon": [...]},
      "density": {"times": [...], "n_points": 201},
      "evolution_time": 0.0
    }

State weights are ``[mode, weight]`` pairs where the weight is a number or a
``[re, im]`` pair; they are normalized on load and the applied factor is kept
for the reports.  Loading is strict: unknown keys and malformed fields raise
ConfigError with a field-addressed message.
"""

from __future__ import annotations

import json
import math
import numbers
from dataclasses import dataclass, field
from pathlib import Path

from .discrimination import BinaryDetector, GaussianReadout, SignalModel
from .insertion import is_nodal
from .wellbox import BoxState, WellGeometry

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Malformed configuration; the message names the offending field."""


@dataclass(frozen=True)
class ScenarioConfig:
    label: str
    geometry: WellGeometry
    states: dict[str, BoxState]
    normalization_factors: dict[str, float]
    insertion_point: float
    n_cut: int
    prior: float | None = None
    signal: SignalModel | None = None
    sweep_xi: tuple[float, ...] = ()
    sweep_epsilon: tuple[float, ...] = ()
    density_times: tuple[float, ...] = ()
    density_points: int | None = None
    evolution_time: float = 0.0

    @property
    def has_pair(self) -> bool:
        return "b" in self.states

    @property
    def wants_costs(self) -> bool:
        return self.has_pair and self.prior is not None and self.signal is not None

    @property
    def wants_sweep(self) -> bool:
        return self.has_pair and self.prior is not None and bool(self.sweep_xi) \
            and bool(self.sweep_epsilon)

    @property
    def wants_density(self) -> bool:
        return bool(self.density_times) and self.density_points is not None


@dataclass
class ValidationReport:
    ok: bool
    issues: list[str]
    nodal: dict[str, bool] = field(default_factory=dict)
    normalization_factors: dict[str, float] = field(default_factory=dict)

    def lines(self) -> list[str]:
        out = ["valid" if self.ok else "invalid"]
        out += [f"issue: {issue}" for issue in self.issues]
        for label in sorted(self.nodal):
            word = "nodal" if self.nodal[label] else "not nodal"
            out.append(f"state {label}: {word} at the insertion point")
        for label in sorted(self.normalization_factors):
            out.append(f"state {label}: normalization factor applied = "
                       f"{self.normalization_factors[label]:.9g}")
        return out


def _require_number(value, location: str) -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigError(f"{location}: expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{location}: must be finite")
    return value


def _require_int(value, location: str) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ConfigError(f"{location}: expected an integer, got {value!r}")
    return int(value)


def _check_keys(mapping: dict, allowed: set[str], location: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"{location}: unknown key(s) {sorted(unknown)}")


def _parse_geometry(raw, location: str) -> WellGeometry:
    if raw is None:
        return WellGeometry()
    if not isinstance(raw, dict):
        raise ConfigError(f"{location}: expected an object")
    _check_keys(raw, {"x_left", "width", "mass", "hbar"}, location)
    kwargs = {key: _require_number(raw[key], f"{location}.{key}") for key in raw}
    try:
        return WellGeometry(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{location}: {exc}") from exc


def _parse_weight(raw, location: str) -> complex:
    if isinstance(raw, numbers.Real) and not isinstance(raw, bool):
        return complex(float(raw), 0.0)
    if (isinstance(raw, list) and len(raw) == 2
            and all(isinstance(v, numbers.Real) and not isinstance(v, bool) for v in raw)):
        return complex(float(raw[0]), float(raw[1]))
    raise ConfigError(f"{location}: weight must be a number or a [re, im] pair")


def _parse_state(raw, geometry: WellGeometry, location: str) -> tuple[BoxState, float]:
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{location}: expected a nonempty list of [mode, weight] pairs")
    weights: dict[int, complex] = {}
    for i, entry in enumerate(raw):
        where = f"{location}[{i}]"
        if not isinstance(entry, list) or len(entry) != 2:
            raise ConfigError(f"{where}: expected a [mode, weight] pair")
        mode = entry[0]
        if isinstance(mode, bool) or not isinstance(mode, numbers.Integral) or mode < 1:
            raise ConfigError(f"{where}: mode number must be a positive integer")
        if int(mode) in weights:
            raise ConfigError(f"{where}: duplicate mode {mode}")
        weights[int(mode)] = _parse_weight(entry[1], where)
    state = BoxState.from_weights(geometry, weights)
    if state.norm_sq() == 0.0:
        raise ConfigError(f"{location}: weights must not all vanish")
    normalized, factor = state.normalized()
    return normalized, factor


def _parse_signal(raw, location: str) -> SignalModel:
    if not isinstance(raw, dict) or "variant" not in raw:
        raise ConfigError(f"{location}: expected an object with a 'variant' key")
    variant = raw["variant"]
    try:
        if variant == "binary_detector":
            _check_keys(raw, {"variant", "false_positive", "false_negative"}, location)
            return BinaryDetector(
                _require_number(raw.get("false_positive", 0.0), f"{location}.false_positive"),
                _require_number(raw.get("false_negative", 0.0), f"{location}.false_negative"))
        if variant == "gaussian_readout":
            _check_keys(raw, {"variant", "mu_nodal", "mu_nonnodal", "sigma"}, location)
            return GaussianReadout(
                _require_number(raw["mu_nodal"], f"{location}.mu_nodal"),
                _require_number(raw["mu_nonnodal"], f"{location}.mu_nonnodal"),
                _require_number(raw["sigma"], f"{location}.sigma"))
    except KeyError as exc:
        raise ConfigError(f"{location}: missing field {exc.args[0]!r}") from exc
    except ValueError as exc:
        raise ConfigError(f"{location}: {exc}") from exc
    raise ConfigError(f"{location}.variant: unknown variant {variant!r}")


def _parse_grid(raw, location: str) -> tuple[float, ...]:
    if not isinstance(raw, list):
        raise ConfigError(f"{location}: expected a list of numbers")
    values = tuple(_require_number(v, f"{location}[{i}]") for i, v in enumerate(raw))
    for i, v in enumerate(values):
        if not 0.0 <= v <= 1.0:
            raise ConfigError(f"{location}[{i}]: grid values must lie in [0, 1]")
    return values


TOP_LEVEL_KEYS = {"schema_version", "label", "geometry", "states", "prior",
                  "insertion_point", "n_cut", "signal", "sweep", "density",
                  "evolution_time"}


def parse_config(document: dict, source: str = "<config>") -> ScenarioConfig:
    if not isinstance(document, dict):
        raise ConfigError(f"{source}: top level must be an object")
    _check_keys(document, TOP_LEVEL_KEYS, source)
    if document.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(
            f"schema_version: expected {SCHEMA_VERSION}, got {document.get('schema_version')!r}")

    geometry = _parse_geometry(document.get("geometry"), "geometry")

    raw_states = document.get("states")
    if not isinstance(raw_states, dict) or "a" not in raw_states:
        raise ConfigError("states: expected an object with at least state 'a'")
    _check_keys(raw_states, {"a", "b"}, "states")
    states: dict[str, BoxState] = {}
    factors: dict[str, float] = {}
    for label, raw_state in raw_states.items():
        states[label], factors[label] = _parse_state(raw_state, geometry, f"states.{label}")

    if "insertion_point" not in document:
        raise ConfigError("insertion_point: required")
    a = _require_number(document["insertion_point"], "insertion_point")
    if not geometry.x_left < a < geometry.x_right:
        raise ConfigError(
            f"insertion_point: must lie strictly between the walls "
            f"({geometry.x_left}, {geometry.x_right})")

    n_cut = _require_int(document.get("n_cut", 1024), "n_cut")
    if n_cut < 1:
        raise ConfigError("n_cut: must be at least 1")

    prior = None
    if "prior" in document:
        prior = _require_number(document["prior"], "prior")
        if not 0.0 <= prior <= 1.0:
            raise ConfigError("prior: must lie in [0, 1]")
    if "b" in states and prior is None:
        raise ConfigError("prior: required when two states are configured")

    signal = _parse_signal(document["signal"], "signal") if "signal" in document else None

    sweep_xi: tuple[float, ...] = ()
    sweep_epsilon: tuple[float, ...] = ()
    if "sweep" in document:
        raw_sweep = document["sweep"]
        if not isinstance(raw_sweep, dict):
            raise ConfigError("sweep: expected an object")
        _check_keys(raw_sweep, {"xi", "epsilon"}, "sweep")
        sweep_xi = _parse_grid(raw_sweep.get("xi", []), "sweep.xi")
        sweep_epsilon = _parse_grid(raw_sweep.get("epsilon", []), "sweep.epsilon")

    density_times: tuple[float, ...] = ()
    density_points = None
    if "density" in document:
        raw_density = document["density"]
        if not isinstance(raw_density, dict):
            raise ConfigError("density: expected an object")
        _check_keys(raw_density, {"times", "n_points"}, "density")
        raw_times = raw_density.get("times")
        if not isinstance(raw_times, list) or not raw_times:
            raise ConfigError("density.times: expected a nonempty list")
        density_times = tuple(_require_number(t, f"density.times[{i}]")
                              for i, t in enumerate(raw_times))
        density_points = _require_int(raw_density.get("n_points", 201), "density.n_points")
        if density_points < 2:
            raise ConfigError("density.n_points: must be at least 2")

    label = document.get("label", "scenario")
    if not isinstance(label, str) or not label:
        raise ConfigError("label: expected a nonempty string")

    evolution_time = _require_number(document.get("evolution_time", 0.0), "evolution_time")

    return ScenarioConfig(
        label=label, geometry=geometry, states=states, normalization_factors=factors,
        insertion_point=a, n_cut=n_cut, prior=prior, signal=signal,
        sweep_xi=sweep_xi, sweep_epsilon=sweep_epsilon,
        density_times=density_times, density_points=density_points,
        evolution_time=evolution_time)


def load_config(path: Path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config file ({exc})") from exc
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})") from exc
    return parse_config(document, source=str(path))


def validate_config(config: ScenarioConfig) -> ValidationReport:
    """Schema passed already; check scenario-level consistency, no computation."""
    issues: list[str] = []
    nodal = {label: is_nodal(state, config.insertion_point)
             for label, state in sorted(config.states.items())}
    if config.wants_costs and not (nodal.get("a", False) ^ nodal.get("b", False)):
        issues.append("signal is uninformative: the two states do not differ "
                      "in nodality at the insertion point")
    if config.sweep_xi and not config.has_pair:
        issues.append("sweep grids need a second state 'b'")
    ok = True  # consistency notes are advisory; schema errors were fatal earlier
    return ValidationReport(ok=ok, issues=issues, nodal=nodal,
                            normalization_factors=dict(config.normalization_factors))
