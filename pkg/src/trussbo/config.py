"""Flat `key = value` run configuration files.

One key per optimizer/material/section/acquisition field, `#` starts a
comment, unknown or duplicate keys are rejected with their line number.
`parse_config(render_config(cfg))` round-trips to an identical config.
"""

from __future__ import annotations

import dataclasses

from .acquisition import AcquisitionConfig, AcquisitionKind
from .bo import BOConfig
from .truss import AL_6061_T6, DEFAULT_SECTION


class ConfigError(ValueError):
    """Malformed configuration; carries the offending 1-based line number
    (0 for whole-file problems)."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"config line {line}: {message}" if line else f"config: {message}")


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "yes", "1"):
        return True
    if lowered in ("false", "no", "0"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_kind(text: str) -> AcquisitionKind:
    try:
        return AcquisitionKind(text.upper())
    except ValueError:
        raise ValueError(f"expected one of EI, PI, LCB, got {text!r}") from None


# key -> (owner, field, parser)
_SCHEMA = {
    "budget": ("bo", "budget", int),
    "n_init": ("bo", "n_init", int),
    "seed": ("bo", "seed", int),
    "gp_restarts": ("bo", "gp_restarts", int),
    "min_improvement": ("bo", "min_improvement", float),
    "stall_patience": ("bo", "stall_patience", int),
    "penalty_fallback": ("bo", "penalty_fallback", _parse_bool),
    "total_load": ("bo", "total_load", float),
    "kind": ("acquisition", "kind", _parse_kind),
    "xi": ("acquisition", "xi", float),
    "beta": ("acquisition", "beta", float),
    "feasibility_weighting": ("acquisition", "feasibility_weighting", _parse_bool),
    "n_candidates": ("acquisition", "n_candidates", int),
    "n_refine_starts": ("acquisition", "n_refine_starts", int),
    "density": ("material", "density", float),
    "youngs_modulus": ("material", "youngs_modulus", float),
    "poisson_ratio": ("material", "poisson_ratio", float),
    "yield_strength": ("material", "yield_strength", float),
    "area": ("section", "area", float),
}


def parse_config(text: str) -> tuple[BOConfig, set[str]]:
    """Parse config text into a :class:`BOConfig`.

    Returns the config and the set of keys that were present, so callers
    can tell an explicit value from a default (e.g. for seed fallbacks).
    """
    values: dict[str, dict] = {"bo": {}, "acquisition": {}, "material": {}, "section": {}}
    seen: dict[str, int] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep or not key or not value:
            raise ConfigError(lineno, f"expected 'key = value', got {raw_line.strip()!r}")
        if key not in _SCHEMA:
            raise ConfigError(lineno, f"unknown key {key!r}")
        if key in seen:
            raise ConfigError(lineno, f"duplicate key {key!r} (first on line {seen[key]})")
        seen[key] = lineno
        owner, fieldname, parser = _SCHEMA[key]
        try:
            values[owner][fieldname] = parser(value)
        except ValueError as exc:
            raise ConfigError(lineno, f"bad value for {key!r}: {exc}") from None

    try:
        config = BOConfig(
            acquisition=AcquisitionConfig(**values["acquisition"]),
            material=dataclasses.replace(AL_6061_T6, **values["material"]),
            section=dataclasses.replace(DEFAULT_SECTION, **values["section"]),
            **values["bo"],
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(0, str(exc)) from exc
    return config, set(seen)


def load_config(path) -> tuple[BOConfig, set[str]]:
    with open(path, encoding="utf-8") as handle:
        return parse_config(handle.read())


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, AcquisitionKind):
        return value.value
    return repr(value) if isinstance(value, float) else str(value)


def render_config(config: BOConfig) -> str:
    """Render every configurable field back to config text."""
    acq = config.acquisition
    mat = config.material
    lines = [
        "# optimization run",
        f"budget = {_format_value(config.budget)}",
        f"n_init = {_format_value(config.n_init)}",
        f"seed = {_format_value(config.seed)}",
        f"gp_restarts = {_format_value(config.gp_restarts)}",
        f"min_improvement = {_format_value(config.min_improvement)}",
        f"stall_patience = {_format_value(config.stall_patience)}",
        f"penalty_fallback = {_format_value(config.penalty_fallback)}",
        f"total_load = {_format_value(config.total_load)}",
        "",
        "# acquisition",
        f"kind = {_format_value(acq.kind)}",
        f"xi = {_format_value(acq.xi)}",
        f"beta = {_format_value(acq.beta)}",
        f"feasibility_weighting = {_format_value(acq.feasibility_weighting)}",
        f"n_candidates = {_format_value(acq.n_candidates)}",
        f"n_refine_starts = {_format_value(acq.n_refine_starts)}",
        "",
        "# material",
        f"density = {_format_value(mat.density)}",
        f"youngs_modulus = {_format_value(mat.youngs_modulus)}",
        f"poisson_ratio = {_format_value(mat.poisson_ratio)}",
        f"yield_strength = {_format_value(mat.yield_strength)}",
        "",
        "# section",
        f"area = {_format_value(config.section.area)}",
    ]
    return "\n".join(lines) + "\n"
