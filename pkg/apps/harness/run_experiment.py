from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path


def _add_repo_to_path() -> Path:
    repo_root = Path(__file__).resolve().parents[2]
    if str(repo_root) not in sys.path:
        sys.path.insert(0, str(repo_root))
    return repo_root


repo_root = _add_repo_to_path()

from apps.harness.config_schema import ConfigIssue, ExperimentConfig, check_config, parse_config  # noqa: E402
from apps.harness.csv_output import write_csv  # noqa: E402
from apps.harness.experiments import EXPERIMENTS, RunContext  # noqa: E402
from src.common.config_utils import load_config  # noqa: E402
from src.common.logging_utils import setup_logging  # noqa: E402
from src.common.run_meta import make_run_id, write_run_meta  # noqa: E402

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2


def _resolve(path: str | Path, base: Path) -> Path:
    path = Path(path)
    return path if path.is_absolute() else (base / path).resolve()


def load_and_check(config_path: Path) -> tuple[ExperimentConfig | None, list[ConfigIssue]]:
    """Parse and validate a config file; ValueError (incl. parse errors) is reported as an issue."""
    try:
        data = load_config(config_path)
    except (OSError, ValueError) as exc:
        return None, [ConfigIssue(field="<file>", message=str(exc))]
    cfg, issues = parse_config(data)
    if cfg is None:
        return None, issues
    return cfg, check_config(cfg, config_path.parent)


def cmd_validate(args: argparse.Namespace) -> int:
    config_path = _resolve(args.config, repo_root)
    _, issues = load_and_check(config_path)
    for issue in issues:
        print(issue)
    errors = [issue for issue in issues if issue.severity == "error"]
    if errors:
        print(f"{config_path}: {len(errors)} error(s)")
        return EXIT_INVALID
    print(f"{config_path}: OK")
    return EXIT_OK


def cmd_list(args: argparse.Namespace) -> int:
    for name, experiment in EXPERIMENTS.items():
        print(f"{name:<15} {','.join(experiment.columns)}")
        print(f"{'':<15} {experiment.description}")
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    config_path = _resolve(args.config, repo_root)
    cfg, issues = load_and_check(config_path)

    log_cfg = cfg.logging if cfg is not None else None
    run_id = make_run_id()
    logger = setup_logging(
        log_cfg.level if log_cfg else "INFO",
        _resolve(log_cfg.dir, repo_root) if log_cfg and log_cfg.dir else None,
        run_id,
    )

    for issue in issues:
        if issue.severity == "warning":
            logger.warning("%s: %s", issue.field, issue.message)
        else:
            logger.error("%s: %s", issue.field, issue.message)
    if cfg is None or any(issue.severity == "error" for issue in issues):
        logger.error("Config invalid: %s", config_path)
        return EXIT_INVALID

    if args.out:
        output = Path(args.out).resolve()
    else:
        output = _resolve(cfg.output or f"results/{cfg.experiment}.csv", repo_root)
    threads = max(1, int(args.threads))
    experiment = EXPERIMENTS[cfg.experiment]

    logger.info("Run %s starting: experiment=%s config=%s", run_id, cfg.experiment, config_path)
    started = time.monotonic()
    try:
        rows = experiment.run(cfg, RunContext(base_dir=config_path.parent, workers=threads, logger=logger))
        count = write_csv(output, cfg.experiment, cfg.header_dict(), experiment.columns, rows)
        elapsed = time.monotonic() - started
        write_run_meta(repo_root, output, cfg.header_dict(), run_id, threads, elapsed)
    except Exception:
        logger.exception("Run %s failed", run_id)
        return EXIT_RUNTIME

    logger.info("Wrote %d rows to %s in %.2fs", count, output, elapsed)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="OFDM crest-factor experiment runner")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run an experiment and write its CSV")
    run.add_argument("--config", required=True, help="Experiment config (YAML)")
    run.add_argument("--out", help="Override the output CSV path")
    run.add_argument("--threads", type=int, default=1, help="Worker threads (speed only, never output)")
    run.set_defaults(func=cmd_run)

    validate = sub.add_parser("validate", help="Check a config without running it")
    validate.add_argument("--config", required=True, help="Experiment config (YAML)")
    validate.set_defaults(func=cmd_validate)

    listing = sub.add_parser("list-experiments", help="Show experiments and their CSV columns")
    listing.set_defaults(func=cmd_list)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
