"""
Pytest fixtures for the OFDM crest-factor test suite.
"""
from __future__ import annotations

import sys
from pathlib import Path
from typing import Callable

import numpy as np
import pytest
import yaml

# Add repo root to path
repo_root = Path(__file__).resolve().parents[1]
if str(repo_root) not in sys.path:
    sys.path.insert(0, str(repo_root))

from src.ofdm.codes import CodeSpec  # noqa: E402

HAMMING_7_4 = np.array(
    [
        [1, 0, 0, 0, 1, 1, 0],
        [0, 1, 0, 0, 0, 1, 1],
        [0, 0, 1, 0, 1, 1, 1],
        [0, 0, 0, 1, 1, 0, 1],
    ],
    dtype=np.uint8,
)


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "slow: long-running acceptance checks (still part of the default run)")


@pytest.fixture
def rng() -> np.random.Generator:
    """Fixed-seed generator for test inputs."""
    return np.random.default_rng(20240611)


@pytest.fixture
def hamming_spec() -> CodeSpec:
    """Systematic Hamming (7,4) code."""
    return CodeSpec.from_generator(HAMMING_7_4)


@pytest.fixture
def uncoded10() -> CodeSpec:
    return CodeSpec.uncoded(10)


@pytest.fixture
def write_config(tmp_path: Path) -> Callable[[dict, str], Path]:
    """Write a config mapping as YAML under tmp_path and return its path."""

    def _write(data: dict, name: str = "experiment.yaml") -> Path:
        path = tmp_path / name
        path.write_text(yaml.safe_dump(data, sort_keys=False), encoding="utf-8")
        return path

    return _write
