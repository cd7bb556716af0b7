from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from src import __version__

TOOL_NAME = "ofdm-lab"


def format_value(value: object) -> str:
    """Shortest round-trip text for floats; integers and flags as plain integers."""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def header_lines(experiment: str, config: dict) -> list[str]:
    return [
        f"# {TOOL_NAME} {__version__}",
        f"# experiment: {experiment}",
        "# config: " + json.dumps(config, sort_keys=True, separators=(",", ":"), ensure_ascii=True),
    ]


def write_csv(
    path: Path,
    experiment: str,
    config: dict,
    columns: Sequence[str],
    rows: Iterable[Sequence[object]],
) -> int:
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", encoding="utf-8", newline="") as handle:
        for line in header_lines(experiment, config):
            handle.write(line + "\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            if len(row) != len(columns):
                raise ValueError(f"row has {len(row)} values, expected {len(columns)}")
            writer.writerow([format_value(v) for v in row])
            count += 1
    return count


def read_csv(path: Path) -> tuple[list[str], list[str], list[dict[str, str]]]:
    """Header comment lines, column names and rows of a harness CSV."""
    with path.open("r", encoding="utf-8", newline="") as handle:
        lines = handle.read().splitlines()
    comments = [line for line in lines if line.startswith("#")]
    body = [line for line in lines if not line.startswith("#")]
    reader = csv.DictReader(body)
    rows = list(reader)
    return comments, list(reader.fieldnames or []), rows
