"""On-disk project store: artifacts, decision log, advisory write lock.

Layout: one directory holding `project.meta`, `artifacts/` (one markup file
per artifact version) and `decisions.log` (append-only, one record per
line).  The log records every artifact save, so replaying it from an empty
store reconstructs the artifact state.
"""

from __future__ import annotations

import datetime
import os
import re
from pathlib import Path

from . import markup
from .errors import StoreError

_NAME_RE = re.compile(r"[A-Za-z0-9_.-]+$")


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


class ProjectLock:
    """Advisory single-writer lock (O_EXCL lock file)."""

    def __init__(self, path: Path):
        self.path = path
        self._fd = None

    def acquire(self):
        try:
            self._fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise StoreError(f"project is locked by another writer: {self.path}") from None
        os.write(self._fd, str(os.getpid()).encode())
        return self

    def release(self):
        if self._fd is not None:
            os.close(self._fd)
            self._fd = None
            try:
                self.path.unlink()
            except FileNotFoundError:
                pass

    def __enter__(self):
        return self.acquire()

    def __exit__(self, *exc):
        self.release()


class Project:
    def __init__(self, root: Path, corpus_ref: str = ""):
        self.root = Path(root)
        self.corpus_ref = corpus_ref

    # -- lifecycle ---------------------------------------------------------

    @classmethod
    def open(cls, path, corpus_ref: str = "") -> "Project":
        root = Path(path)
        meta = root / "project.meta"
        if meta.exists():
            attrs, _ = markup.parse_decision_line(meta.read_text("utf-8").strip())
            return cls(root, attrs.get("CORPUS", ""))
        root.mkdir(parents=True, exist_ok=True)
        (root / "artifacts").mkdir(exist_ok=True)
        project = cls(root, corpus_ref)
        meta.write_text(
            markup.decision_line(_now(), "project-meta", [("CORPUS", corpus_ref)]) + "\n",
            "utf-8",
        )
        return project

    @property
    def artifacts_dir(self) -> Path:
        return self.root / "artifacts"

    @property
    def log_path(self) -> Path:
        return self.root / "decisions.log"

    def write_lock(self) -> ProjectLock:
        return ProjectLock(self.root / "project.lock")

    # -- artifacts ---------------------------------------------------------

    def _versions(self, name: str) -> list[int]:
        versions = []
        for path in self.artifacts_dir.glob(f"{name}@*.mkp"):
            suffix = path.stem.rsplit("@", 1)[1]
            if suffix.isdigit():
                versions.append(int(suffix))
        if (self.artifacts_dir / f"{name}.mkp").exists():
            versions.append(1)
        return sorted(versions)

    def save_artifact(self, name: str, artifact, log: bool = True) -> str:
        """Store under `name`; a second save of the same name becomes name@2."""
        if not _NAME_RE.match(name) or "@" in name:
            raise StoreError(f"bad artifact name {name!r}")
        with self.write_lock():
            versions = self._versions(name)
            version = (versions[-1] + 1) if versions else 1
            stored = name if version == 1 else f"{name}@{version}"
            path = self.artifacts_dir / f"{stored}.mkp"
            path.write_text(markup.artifact_to_text(artifact), "utf-8")
            if log:
                self._append_log(
                    markup.decision_line(
                        _now(), "save-artifact", [("NAME", name)], payload=artifact
                    )
                )
        return stored

    def get_artifact(self, name: str):
        """Fetch by exact versioned name, or latest version for a bare name."""
        path = self.artifacts_dir / f"{name}.mkp"
        if not path.exists() and "@" not in name:
            versions = self._versions(name)
            if versions and versions[-1] > 1:
                path = self.artifacts_dir / f"{name}@{versions[-1]}.mkp"
        if not path.exists():
            raise StoreError(f"unknown artifact {name!r}")
        return markup.artifact_from_text(path.read_text("utf-8"))

    def list_artifacts(self) -> list[str]:
        return sorted(p.stem for p in self.artifacts_dir.glob("*.mkp"))

    # -- decision log ------------------------------------------------------

    def _append_log(self, line: str) -> None:
        with open(self.log_path, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")

    def log_decision(self, kind: str, attrs=(), payload=None) -> None:
        with self.write_lock():
            self._append_log(markup.decision_line(_now(), kind, attrs, payload))

    def decisions(self) -> list[tuple[dict, object]]:
        if not self.log_path.exists():
            return []
        records = []
        for line in self.log_path.read_text("utf-8").splitlines():
            if line.strip():
                records.append(markup.parse_decision_line(line))
        return records

    def replay(self) -> None:
        """Rebuild artifacts/ from the decision log alone.  Idempotent."""
        records = self.decisions()
        with self.write_lock():
            for path in self.artifacts_dir.glob("*.mkp"):
                path.unlink()
        for attrs, payload in records:
            if attrs.get("KIND") == "save-artifact" and payload is not None:
                name = attrs["NAME"]
                # re-save without logging: the log already holds the event
                with self.write_lock():
                    versions = self._versions(name)
                    version = (versions[-1] + 1) if versions else 1
                    stored = name if version == 1 else f"{name}@{version}"
                    (self.artifacts_dir / f"{stored}.mkp").write_text(
                        markup.artifact_to_text(payload), "utf-8"
                    )


def open_project(path, corpus_ref: str = "") -> Project:
    return Project.open(path, corpus_ref)
