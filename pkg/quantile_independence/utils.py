from __future__ import annotations

import re
from typing import TYPE_CHECKING, Any

import numpy as np

from quantile_independence.exceptions import InputFormatError, QuantileIndependenceError
from quantile_independence.models.spec import IndependenceSpec

if TYPE_CHECKING:
    from pathlib import Path

    from quantile_independence.types import JsonDict

_SPEC_PATTERN = re.compile(r"^(?P<family>[TU])\s*=\s*(?P<body>.+)$")


def parse_spec(text: str) -> IndependenceSpec:
    """Parse an assumption from its command-line form.

    Accepted forms are ``full``, ``none``, ``mean``, an interval ``T=[a,b]`` (or
    ``T=a:b``) and a point set ``T={t1,t2}`` (or ``T=t1,t2``); ``U`` works like ``T``.
    This is the inverse of :attr:`IndependenceSpec.label`.
    """
    cleaned = text.strip()
    if cleaned.lower() in ("full", "none", "mean"):
        return IndependenceSpec(cleaned.lower())  # type: ignore[arg-type]
    match = _SPEC_PATTERN.match(cleaned)
    if match is None:
        raise InputFormatError("Cannot parse independence spec", spec=text)
    kind = "t_set" if match["family"] == "T" else "u_set"
    body = match["body"].strip()
    try:
        if body.startswith("[") and body.endswith("]"):
            a, b = (float(part) for part in body[1:-1].split(","))
            return IndependenceSpec(kind, interval=(a, b))  # type: ignore[arg-type]
        if ":" in body:
            a, b = (float(part) for part in body.split(":"))
            return IndependenceSpec(kind, interval=(a, b))  # type: ignore[arg-type]
        points = tuple(float(part) for part in body.strip("{}").split(","))
        return IndependenceSpec(kind, points=points)  # type: ignore[arg-type]
    except ValueError as e:
        if isinstance(e, QuantileIndependenceError):
            raise
        raise InputFormatError("Cannot parse independence spec", spec=text) from e


def parse_delta_grid(text: str) -> list[float]:
    """Parse ``d1,d2,...`` or ``start:stop:count`` (inclusive of both ends)."""
    try:
        if text.count(":") == 2:
            start, stop, count = text.split(":")
            return [float(d) for d in np.linspace(float(start), float(stop), int(count))]
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise InputFormatError("Cannot parse delta grid", delta_grid=text) from e


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"Not a boolean: {text!r}")


def _split_list(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


CONFIG_PARSERS: dict[str, Any] = {
    "source": str,
    "gamma": float,
    "pi": float,
    "p1": float,
    "delta_grid": parse_delta_grid,
    "params": _split_list,
    "q": float,
    "specs": _split_list,
    "n_knots": int,
    "n_cells": int,
    "oracle": _parse_bool,
    "out": str,
}


def read_config_file(path: str | Path) -> JsonDict:
    """Read a flat ``key = value`` file; ``#`` starts a comment.

    Raises
    ------
    InputFormatError
        On an unknown key, a line without ``=`` or an unparsable value, with its line number.
    """
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise InputFormatError(f"Cannot read config file {path}: {e}") from e

    settings: JsonDict = {}
    for number, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep:
            raise InputFormatError("Expected 'key = value'", line=number)
        if key not in CONFIG_PARSERS:
            raise InputFormatError("Unknown config key", line=number, key=key)
        try:
            settings[key] = CONFIG_PARSERS[key](value)
        except ValueError as e:
            raise InputFormatError(f"Bad value for {key}", line=number, value=value) from e
    return settings
