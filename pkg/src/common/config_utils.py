from __future__ import annotations

from pathlib import Path

import yaml

from src.ofdm.errors import ConfigParseError


def load_config(path: Path) -> dict:
    """Read a YAML mapping; syntax errors carry the 1-based line and column."""
    with path.open("r", encoding="utf-8") as handle:
        text = handle.read()
    try:
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        line = mark.line + 1 if mark is not None else 0
        column = mark.column + 1 if mark is not None else 0
        raise ConfigParseError(str(path), line, column, exc.problem or str(exc)) from exc
    if not isinstance(data, dict):
        raise ValueError("Config must be a mapping")
    return data
