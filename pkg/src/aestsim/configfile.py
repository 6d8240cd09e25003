"""Flat key-value scenario configuration files.

One ``key = value`` per line, ``#`` starts a comment, five sections:
``[chain] [bath] [pulse] [run] [sweep]``.  Numbers are decimals with an
optional exponent.  Unknown sections or keys are hard errors.
"""

from __future__ import annotations

import math
import os

from .bath import BathParams
from .control import PulseSpec
from .harness import Scenario
from .operators import pst_couplings, uniform_couplings
from .propagator import SimConfig


class ConfigError(ValueError):
    """Malformed scenario configuration."""


_SCHEMA = {
    "chain": ("n", "couplings"),
    "bath": ("Gamma", "gamma", "T", "lindblad", "coupling"),
    "pulse": ("shape", "intensity", "half_period"),
    "run": ("name", "total_time", "steps_per_half_period", "evolution", "norm", "fidelity_target"),
    "sweep": ("parameter", "values"),
}


def _parse_lines(text: str) -> dict:
    data = {section: {} for section in _SCHEMA}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SCHEMA:
                raise ConfigError(f"line {lineno}: unknown section [{section}]")
            continue
        if section is None:
            raise ConfigError(f"line {lineno}: key before any [section]")
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = key.strip(), value.strip()
        if key not in _SCHEMA[section]:
            raise ConfigError(f"line {lineno}: unknown key {key!r} in section [{section}]")
        if key in data[section]:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} in section [{section}]")
        data[section][key] = value
    return data


def _as_float(section: str, key: str, value: str) -> float:
    try:
        out = float(value)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: cannot parse number {value!r}") from None
    if not math.isfinite(out):
        raise ConfigError(f"[{section}] {key}: number must be finite, got {value!r}")
    return out


def _as_int(section: str, key: str, value: str) -> int:
    try:
        return int(value, 10)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: cannot parse integer {value!r}") from None


def parse_scenario(text: str, default_name: str = "scenario") -> Scenario:
    """Build a scenario from configuration text."""
    data = _parse_lines(text)

    chain_sec = data["chain"]
    if "n" not in chain_sec:
        raise ConfigError("[chain] n is required")
    n = _as_int("chain", "n", chain_sec["n"])
    couplings = chain_sec.get("couplings", "uniform")
    try:
        if couplings == "uniform":
            chain = uniform_couplings(n)
        elif couplings == "pst":
            chain = pst_couplings(n)
        else:
            raise ConfigError(f"[chain] couplings must be 'uniform' or 'pst', got {couplings!r}")
    except ValueError as exc:
        raise ConfigError(f"[chain] {exc}") from None

    bath_sec = data["bath"]
    try:
        bath = BathParams(
            Gamma=_as_float("bath", "Gamma", bath_sec.get("Gamma", "0")),
            gamma=_as_float("bath", "gamma", bath_sec.get("gamma", "1")),
            temperature=_as_float("bath", "T", bath_sec.get("T", "0")),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"[bath] {exc}") from None

    pulse_sec = data["pulse"]
    try:
        pulse = PulseSpec(
            shape=pulse_sec.get("shape", "none"),
            intensity=_as_float("pulse", "intensity", pulse_sec.get("intensity", "0")),
            half_period=_as_float("pulse", "half_period", pulse_sec.get("half_period", "0")),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"[pulse] {exc}") from None

    run_sec = data["run"]
    kwargs = {}
    if "total_time" in run_sec:
        kwargs["total_time"] = _as_float("run", "total_time", run_sec["total_time"])
    if "steps_per_half_period" in run_sec:
        kwargs["steps_per_half_period"] = _as_int(
            "run", "steps_per_half_period", run_sec["steps_per_half_period"]
        )
    if "evolution" in run_sec:
        kwargs["evolution"] = run_sec["evolution"]
    if "norm" in run_sec:
        kwargs["rho_dot_norm_kind"] = run_sec["norm"]
    try:
        config = SimConfig(
            chain=chain,
            bath=bath,
            lindblad_kind=bath_sec.get("lindblad", "sigma_minus"),
            coupling=bath_sec.get("coupling", "per_site"),
            pulse=pulse,
            **kwargs,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    sweep_sec = data["sweep"]
    parameter = sweep_sec.get("parameter")
    values: tuple[float, ...] = ()
    if ("parameter" in sweep_sec) != ("values" in sweep_sec):
        raise ConfigError("[sweep] needs both 'parameter' and 'values'")
    if "values" in sweep_sec:
        items = [v.strip() for v in sweep_sec["values"].split(",")]
        if not any(items):
            raise ConfigError("[sweep] values must be a non-empty comma-separated list")
        values = tuple(_as_float("sweep", "values", v) for v in items if v)

    fidelity_target = None
    if "fidelity_target" in run_sec:
        fidelity_target = _as_float("run", "fidelity_target", run_sec["fidelity_target"])

    try:
        return Scenario(
            name=run_sec.get("name", default_name),
            config=config,
            sweep_parameter=parameter,
            sweep_values=values,
            fidelity_target=fidelity_target,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_scenario(path: str) -> Scenario:
    """Parse a scenario configuration file; the file stem is the default name."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    stem = os.path.splitext(os.path.basename(path))[0]
    return parse_scenario(text, default_name=stem)
