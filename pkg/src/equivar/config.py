"""Scenario configuration parsing: files, inline JSON, and built-in names."""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from pathlib import Path

from .builtin import BUILTIN_SCENARIOS
from .errors import ParseError, UnknownScenario
from .fields import (
    EquivariantField,
    GaugeTransform,
    build_scenario_field,
    build_scenario_gauge,
    transversal_parts,
)
from .poly import InvariantPolynomial
from .scenarios import Scenario, resolve_scenario

DEFAULT_TOLERANCES = {
    "releq": 1e-8,
    "equivariance": 1e-9,
    "branch": 1e-8,
    "newton": 1e-10,
    "rank_tol": 1e-9,
    "rank_height": 100,
}

_TOP_LEVEL_KEYS = {"group", "model", "coefficients", "gauge", "lambda_interval",
                   "tolerances"}


@dataclass
class ScenarioConfig:
    name: str | None
    scenario: Scenario
    field: EquivariantField
    gauge: GaugeTransform
    lambda_interval: tuple[float, float] | None
    tolerances: dict
    raw: dict = dc_field(repr=False, default_factory=dict)


def parse_scenario(source) -> ScenarioConfig:
    """Parse a scenario from a built-in name, a file path, inline JSON, or a dict."""
    name = None
    if isinstance(source, dict):
        data = source
    elif isinstance(source, (str, Path)):
        text = str(source)
        if text in BUILTIN_SCENARIOS:
            name = text
            data = BUILTIN_SCENARIOS[text]
        elif text.lstrip().startswith("{"):
            try:
                data = json.loads(text)
            except json.JSONDecodeError as err:
                raise ParseError(f"invalid inline JSON: {err}") from err
        else:
            path = Path(text)
            if not path.exists():
                raise ParseError(
                    f"scenario {text!r} is neither a built-in name nor a readable file"
                )
            try:
                data = json.loads(path.read_text())
            except json.JSONDecodeError as err:
                raise ParseError(f"invalid JSON in {text!r}: {err}") from err
    else:
        raise ParseError(f"unsupported scenario source {type(source).__name__!r}")
    return _from_dict(data, name)


def _from_dict(data: dict, name: str | None) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ParseError("scenario config must be a JSON object")
    for key in data:
        if key not in _TOP_LEVEL_KEYS:
            raise ParseError(f"unknown config key {key!r}")
    if "group" not in data:
        raise ParseError("config is missing the key 'group'")
    scenario = resolve_scenario(data["group"], data.get("model"))

    coeffs_raw = data.get("coefficients")
    if not isinstance(coeffs_raw, dict):
        raise ParseError("config is missing the 'coefficients' table object")
    coeffs = {k: InvariantPolynomial.from_json(scenario.nvars, v)
              for k, v in coeffs_raw.items()}
    field = build_scenario_field(scenario, coeffs)

    if "gauge" in data:
        gauge_coeffs = {k: InvariantPolynomial.from_json(scenario.nvars, v)
                        for k, v in data["gauge"].items()}
        gauge = build_scenario_gauge(scenario, gauge_coeffs)
    else:
        # the natural gauge path: the standard form's own angular coefficients
        _, gauge = transversal_parts(field)

    interval = None
    if data.get("lambda_interval") is not None:
        raw = data["lambda_interval"]
        if not (isinstance(raw, (list, tuple)) and len(raw) == 2):
            raise ParseError("'lambda_interval' must be a pair [lo, hi]")
        interval = (float(raw[0]), float(raw[1]))
        field.lambda_interval = interval
        gauge.lambda_interval = interval

    tolerances = dict(DEFAULT_TOLERANCES)
    for key, value in (data.get("tolerances") or {}).items():
        if key not in DEFAULT_TOLERANCES:
            raise ParseError(f"unknown tolerance key {key!r}")
        tolerances[key] = type(DEFAULT_TOLERANCES[key])(value)

    return ScenarioConfig(name, scenario, field, gauge, interval, tolerances, dict(data))
