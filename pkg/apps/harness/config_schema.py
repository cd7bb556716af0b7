"""Experiment config schema.

Field-level checks live on the pydantic models; checks that span several
fields are collected by ``check_config`` so that ``validate`` can list every
problem in one pass.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.ofdm.bounds import UNION_CHERNOFF_MAX_SAMPLES
from src.ofdm.codes import ENUMERATION_LIMIT, CodeKind, CodeSpec, load_generator
from src.ofdm.metrics import RELIABLE_HITS

ExperimentName = Literal["ccdf", "bounds-compare", "effective-cf", "aom-scaling", "balance", "code-cf"]

MONTE_CARLO_EXPERIMENTS = {"effective-cf", "aom-scaling"}
THRESHOLD_EXPERIMENTS = {"ccdf", "bounds-compare", "balance"}
N_LIST_EXPERIMENTS = {"effective-cf", "aom-scaling"}


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ThresholdRange(_Strict):
    start: float
    stop: float
    step: float = Field(gt=0)

    @model_validator(mode="after")
    def _ordered(self) -> ThresholdRange:
        if self.stop < self.start:
            raise ValueError(f"stop ({self.stop}) must be >= start ({self.start})")
        return self

    def values(self) -> list[float]:
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [float(v) for v in self.start + self.step * np.arange(count)]


class CodeConfig(_Strict):
    kind: Literal["uncoded", "generator", "explicit", "repetition", "parity"] = "uncoded"
    generator: list[str] | None = None
    generator_file: str | None = None
    words: list[list[int]] | None = None

    @field_validator("generator")
    @classmethod
    def _binary_rows(cls, rows: list[str] | None) -> list[str] | None:
        if rows is not None:
            for row in rows:
                if not row or set(row) - {"0", "1"}:
                    raise ValueError(f"generator rows may only contain '0' and '1', got {row!r}")
        return rows

    def build(self, n: int | None, base_dir: Path) -> CodeSpec:
        if self.kind == "uncoded":
            return CodeSpec.uncoded(_require_n(n))
        if self.kind == "repetition":
            return CodeSpec.repetition(_require_n(n))
        if self.kind == "parity":
            return CodeSpec.parity(_require_n(n))
        if self.kind == "explicit":
            if not self.words:
                raise ValueError("explicit code needs 'words'")
            return CodeSpec.explicit(np.array(self.words, dtype=np.float64))
        if self.generator is not None:
            matrix = np.array([[int(ch) for ch in row] for row in self.generator], dtype=np.uint8)
        elif self.generator_file is not None:
            path = Path(self.generator_file)
            if not path.is_absolute():
                path = base_dir / path
            matrix = load_generator(path)
        else:
            raise ValueError("generator code needs 'generator' rows or 'generator_file'")
        return CodeSpec.from_generator(matrix)


def _require_n(n: int | None) -> int:
    if n is None:
        raise ValueError("code length N is not set")
    return n


class AmplifierConfig(_Strict):
    model: Literal["sel", "cubic"] = "sel"
    lam: float | None = Field(default=None, gt=0)
    a: float = Field(default=1.0, gt=0)
    b: float = Field(default=0.1, gt=0)


class LoggingConfig(_Strict):
    level: str = "INFO"
    dir: str | None = None


class ExperimentConfig(_Strict):
    experiment: ExperimentName
    n: int | None = Field(default=None, ge=1)
    n_list: list[int] | None = None
    oversampling: int = Field(default=1, ge=1)
    oversampling_list: list[int] | None = None
    k_min: int = 3
    k_max: int = 64
    trials: int | None = Field(default=None, ge=1)
    seed: int | None = Field(default=None, ge=0)
    mode: Literal["monte-carlo", "exact"] = "monte-carlo"
    thresholds: list[float] | None = None
    threshold_range: ThresholdRange | None = None
    code: CodeConfig = Field(default_factory=CodeConfig)
    amplifier: AmplifierConfig = Field(default_factory=AmplifierConfig)
    epsilon: float | None = Field(default=None, gt=0)
    level: float | None = Field(default=None, gt=0)
    h: Literal["aom", "magnitude"] = "aom"
    ccdf_bound: Literal["exact", "thm3-linear", "thm3-nonlinear", "union-chernoff"] = "exact"
    output: str | None = None
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    @field_validator("k_min", "k_max")
    @classmethod
    def _projection_count(cls, k: int) -> int:
        if k < 3:
            raise ValueError(f"K ≥ 3 required, got {k}")
        return k

    @field_validator("n_list", "oversampling_list")
    @classmethod
    def _positive_list(cls, values: list[int] | None) -> list[int] | None:
        if values is not None:
            if not values:
                raise ValueError("list must not be empty")
            if any(v < 1 for v in values):
                raise ValueError("every entry must be >= 1")
        return values

    @property
    def k_range(self) -> tuple[int, ...]:
        return tuple(range(self.k_min, self.k_max + 1))

    @property
    def uses_monte_carlo(self) -> bool:
        if self.experiment in MONTE_CARLO_EXPERIMENTS:
            return True
        return self.experiment in {"ccdf", "balance"} and self.mode == "monte-carlo"

    def threshold_values(self) -> list[float]:
        if self.thresholds is not None:
            return [float(v) for v in self.thresholds]
        if self.threshold_range is not None:
            return self.threshold_range.values()
        return []

    def header_dict(self) -> dict:
        """Everything that determines the CSV contents; runtime-only fields stay out."""
        return self.model_dump(mode="json", exclude={"output", "logging"})


@dataclass(frozen=True)
class ConfigIssue:
    field: str
    message: str
    severity: Literal["error", "warning"] = "error"

    def __str__(self) -> str:
        return f"{self.severity}: {self.field}: {self.message}"


def format_validation_error(exc: ValidationError) -> list[ConfigIssue]:
    issues = []
    for err in exc.errors():
        field = ".".join(str(part) for part in err["loc"]) or "<root>"
        issues.append(ConfigIssue(field=field, message=err["msg"]))
    return issues


def parse_config(data: dict) -> tuple[ExperimentConfig | None, list[ConfigIssue]]:
    try:
        return ExperimentConfig.model_validate(data), []
    except ValidationError as exc:
        return None, format_validation_error(exc)


def check_config(cfg: ExperimentConfig, base_dir: Path) -> list[ConfigIssue]:
    """Cross-field preconditions. Errors block a run; warnings do not."""
    issues: list[ConfigIssue] = []

    def error(field: str, message: str) -> None:
        issues.append(ConfigIssue(field, message))

    def warning(field: str, message: str) -> None:
        issues.append(ConfigIssue(field, message, "warning"))

    if cfg.k_min > cfg.k_max:
        error("k_min", f"k_min ({cfg.k_min}) must not exceed k_max ({cfg.k_max})")

    if cfg.uses_monte_carlo:
        if cfg.seed is None:
            error("seed", f"seed is required for Monte Carlo experiment {cfg.experiment!r}")
        if cfg.trials is None:
            error("trials", f"trials is required for Monte Carlo experiment {cfg.experiment!r}")

    if cfg.experiment in THRESHOLD_EXPERIMENTS:
        if cfg.thresholds is None and cfg.threshold_range is None:
            error("thresholds", "thresholds or threshold_range is required")
        if cfg.thresholds is not None and cfg.threshold_range is not None:
            error("thresholds", "give either thresholds or threshold_range, not both")
        values = cfg.threshold_values()
        if cfg.thresholds is not None and cfg.thresholds == []:
            error("thresholds", "thresholds must not be empty")
        if any(not math.isfinite(v) or v < 0 for v in values):
            error("thresholds", "thresholds must be finite and >= 0")
        if any(b <= a for a, b in zip(values, values[1:])):
            error("thresholds", "thresholds must be strictly ascending")

    if cfg.experiment in N_LIST_EXPERIMENTS:
        if cfg.n_list is None:
            error("n_list", f"n_list is required for {cfg.experiment!r}")
        elif cfg.code.kind in {"generator", "explicit"}:
            error("code.kind", f"{cfg.experiment!r} builds one code per N; use uncoded, repetition or parity")

    spec = None
    if cfg.experiment not in N_LIST_EXPERIMENTS:
        try:
            spec = cfg.code.build(cfg.n, base_dir)
        except (OSError, ValueError) as exc:
            error("code", str(exc))
        if spec is not None and cfg.n is not None and spec.n != cfg.n:
            error("n", f"n={cfg.n} does not match the code length {spec.n}")

    if spec is not None:
        exhaustive = cfg.experiment in {"bounds-compare", "code-cf"} or (
            cfg.experiment in {"ccdf", "balance"} and cfg.mode == "exact"
        )
        if cfg.experiment == "balance" and cfg.ccdf_bound == "exact":
            exhaustive = True
        if exhaustive and spec.size > ENUMERATION_LIMIT:
            error("code", f"code has {spec.size} codewords, enumeration limit is {ENUMERATION_LIMIT}")

        union_samples = None
        if cfg.experiment == "bounds-compare" and spec.kind is CodeKind.UNCODED:
            union_samples = spec.n * cfg.oversampling
        elif cfg.experiment == "balance" and cfg.ccdf_bound == "union-chernoff":
            union_samples = spec.n
        if union_samples is not None and union_samples > UNION_CHERNOFF_MAX_SAMPLES:
            error(
                "ccdf_bound" if cfg.experiment == "balance" else "oversampling",
                f"union-Chernoff needs N*L <= {UNION_CHERNOFF_MAX_SAMPLES}, got {union_samples}",
            )

    if cfg.experiment == "effective-cf":
        if cfg.epsilon is None:
            error("epsilon", "epsilon (target outage) is required")
        elif cfg.epsilon > 1:
            error("epsilon", f"epsilon must lie in (0, 1], got {cfg.epsilon}")
        elif cfg.trials is not None and cfg.epsilon < RELIABLE_HITS / cfg.trials:
            warning(
                "epsilon",
                f"epsilon={cfg.epsilon:g} is below MC resolution floor {RELIABLE_HITS / cfg.trials:g} "
                f"({RELIABLE_HITS}/trials)",
            )

    if cfg.experiment == "aom-scaling":
        if cfg.epsilon is None:
            error("epsilon", "epsilon (clip-level schedule margin) is required")
        if cfg.level is None:
            error("level", "level (AOM threshold x) is required")
        if cfg.n_list is not None and any(n < 3 for n in cfg.n_list):
            error("n_list", "N ≥ 3 required for the log log N schedule")

    if cfg.experiment == "balance":
        if cfg.amplifier.model != "sel":
            error("amplifier.model", "balance bounds apply to the SEL model only")
        if cfg.amplifier.lam is None:
            error("amplifier.lam", "SEL clip level lam is required")
        if cfg.oversampling != 1:
            error("oversampling", "balance bounds are stated for L = 1")
        if any(v <= 0 for v in cfg.threshold_values()):
            error("thresholds", "distortion levels must be > 0")

    if cfg.experiment == "code-cf" and cfg.oversampling_list is None:
        error("oversampling_list", "oversampling_list is required for 'code-cf'")

    if cfg.amplifier.lam is not None and cfg.n is not None and cfg.amplifier.lam >= math.sqrt(cfg.n):
        warning("amplifier.lam", f"lam={cfg.amplifier.lam:g} >= sqrt(N); the limiter never clips")

    return issues
