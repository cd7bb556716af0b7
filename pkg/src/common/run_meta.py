from __future__ import annotations

import json
import platform
import sys
import uuid
from datetime import datetime, timezone
from pathlib import Path

from src import __version__


def make_run_id() -> str:
    stamp = datetime.now(timezone.utc).strftime("%Y%m%d_%H%M%S")
    return f"{stamp}_{uuid.uuid4().hex[:8]}"


def read_git_commit(repo_root: Path) -> str:
    git_dir = repo_root / ".git"
    try:
        head = (git_dir / "HEAD").read_text(encoding="utf-8").strip()
    except (FileNotFoundError, NotADirectoryError):
        return "unknown"
    if not head.startswith("ref:"):
        return head

    ref = head.split(" ", 1)[1].strip()
    loose = git_dir / ref
    if loose.exists():
        return loose.read_text(encoding="utf-8").strip()
    packed = git_dir / "packed-refs"
    if packed.exists():
        for line in packed.read_text(encoding="utf-8").splitlines():
            if not line or line[0] in "#^":
                continue
            sha, name = line.split(" ", 1)
            if name.strip() == ref:
                return sha
    return "unknown"


def meta_path_for(output: Path) -> Path:
    return output.with_name(output.name + ".meta.json")


def write_run_meta(
    repo_root: Path,
    output: Path,
    config: dict,
    run_id: str,
    threads: int,
    elapsed_sec: float,
) -> Path:
    """Sidecar with host and timing details that must stay out of the CSV."""
    meta = {
        "run_id": run_id,
        "created_at_utc": datetime.now(timezone.utc).isoformat(),
        "tool_version": __version__,
        "git_commit": read_git_commit(repo_root),
        "host": {
            "platform": platform.platform(),
            "python": sys.version.replace("\n", " "),
        },
        "threads": threads,
        "elapsed_sec": round(elapsed_sec, 3),
        "output": str(output),
        "config": config,
    }
    path = meta_path_for(output)
    path.write_text(json.dumps(meta, indent=2, ensure_ascii=True) + "\n", encoding="utf-8")
    return path
