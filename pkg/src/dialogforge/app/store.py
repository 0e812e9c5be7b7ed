"""Embedded session store (sqlite3).

Tracks pipeline sessions, their stage, config snapshot, headline metrics
(for the cross-session history view) and simulation jobs. Artifacts stay
on disk in the session's data directory; the store only records where.
"""

from __future__ import annotations

import sqlite3
import threading
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from ..errors import DialogForgeError

STAGES = ["created", "parsed", "revised", "goals_ready", "simulated", "remediated"]

JOB_QUEUED = "queued"
JOB_RUNNING = "running"
JOB_DONE = "done"
JOB_FAILED = "failed"

_SCHEMA = """
CREATE TABLE IF NOT EXISTS sessions (
    session_id TEXT PRIMARY KEY,
    name TEXT NOT NULL,
    stage TEXT NOT NULL,
    created_at TEXT NOT NULL,
    updated_at TEXT NOT NULL,
    config TEXT NOT NULL,
    data_dir TEXT NOT NULL,
    map_version INTEGER NOT NULL DEFAULT 1
);
CREATE TABLE IF NOT EXISTS session_metrics (
    session_id TEXT NOT NULL,
    key TEXT NOT NULL,
    value REAL NOT NULL,
    PRIMARY KEY (session_id, key)
);
CREATE TABLE IF NOT EXISTS jobs (
    job_id TEXT PRIMARY KEY,
    session_id TEXT NOT NULL,
    kind TEXT NOT NULL,
    status TEXT NOT NULL,
    error TEXT,
    created_at TEXT NOT NULL,
    updated_at TEXT NOT NULL
);
"""


class StageTransitionError(DialogForgeError):
    """Stages only move forward through the pipeline order."""

    code = "stage_transition"


class UnknownSession(DialogForgeError):
    code = "unknown_session"


@dataclass
class SessionEntry:
    session_id: str
    name: str
    stage: str
    created_at: str
    updated_at: str
    config: str
    data_dir: str
    map_version: int

    def to_doc(self) -> dict:
        return {
            "session_id": self.session_id,
            "name": self.name,
            "stage": self.stage,
            "created_at": self.created_at,
            "updated_at": self.updated_at,
            "data_dir": self.data_dir,
            "map_version": self.map_version,
        }


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class SessionStore:
    def __init__(self, db_path: str | Path):
        self.db_path = str(db_path)
        self._lock = threading.Lock()
        with self._connect() as conn:
            conn.executescript(_SCHEMA)

    def _connect(self) -> sqlite3.Connection:
        conn = sqlite3.connect(self.db_path)
        conn.row_factory = sqlite3.Row
        return conn

    # -- sessions ------------------------------------------------------------

    def create_session(self, name: str, config_json: str, data_dir: str) -> SessionEntry:
        session_id = uuid.uuid4().hex[:12]
        now = _now()
        with self._lock, self._connect() as conn:
            conn.execute(
                "INSERT INTO sessions VALUES (?, ?, ?, ?, ?, ?, ?, 1)",
                (session_id, name, "created", now, now, config_json, data_dir),
            )
        return self.get_session(session_id)

    def get_session(self, session_id: str) -> SessionEntry:
        with self._connect() as conn:
            row = conn.execute(
                "SELECT * FROM sessions WHERE session_id = ?", (session_id,)
            ).fetchone()
        if row is None:
            raise UnknownSession(f"no session {session_id!r}", session_id=session_id)
        return SessionEntry(**dict(row))

    def list_sessions(self) -> list[SessionEntry]:
        with self._connect() as conn:
            rows = conn.execute("SELECT * FROM sessions ORDER BY created_at, session_id").fetchall()
        return [SessionEntry(**dict(r)) for r in rows]

    def advance_stage(self, session_id: str, stage: str) -> SessionEntry:
        if stage not in STAGES:
            raise StageTransitionError(f"unknown stage {stage!r}")
        entry = self.get_session(session_id)
        if STAGES.index(stage) < STAGES.index(entry.stage):
            raise StageTransitionError(
                f"cannot move session from {entry.stage!r} back to {stage!r}",
                session_id=session_id,
            )
        with self._lock, self._connect() as conn:
            conn.execute(
                "UPDATE sessions SET stage = ?, updated_at = ? WHERE session_id = ?",
                (stage, _now(), session_id),
            )
        return self.get_session(session_id)

    def bump_map_version(self, session_id: str) -> int:
        with self._lock, self._connect() as conn:
            conn.execute(
                "UPDATE sessions SET map_version = map_version + 1, updated_at = ? "
                "WHERE session_id = ?",
                (_now(), session_id),
            )
        return self.get_session(session_id).map_version

    def delete_session(self, session_id: str) -> None:
        with self._lock, self._connect() as conn:
            conn.execute("DELETE FROM sessions WHERE session_id = ?", (session_id,))
            conn.execute("DELETE FROM session_metrics WHERE session_id = ?", (session_id,))
            conn.execute("DELETE FROM jobs WHERE session_id = ?", (session_id,))

    # -- metrics (history view) ----------------------------------------------

    def record_metrics(self, session_id: str, metrics: dict[str, float]) -> None:
        with self._lock, self._connect() as conn:
            for key, value in metrics.items():
                conn.execute(
                    "INSERT OR REPLACE INTO session_metrics VALUES (?, ?, ?)",
                    (session_id, key, float(value)),
                )

    def metrics_for(self, session_id: str) -> dict[str, float]:
        with self._connect() as conn:
            rows = conn.execute(
                "SELECT key, value FROM session_metrics WHERE session_id = ?", (session_id,)
            ).fetchall()
        return {row["key"]: row["value"] for row in rows}

    def history(self) -> list[dict]:
        """Headline metrics of every remediated session, oldest first."""
        entries = []
        for session in self.list_sessions():
            metrics = self.metrics_for(session.session_id)
            if not metrics:
                continue
            entries.append(
                {
                    "name": session.name,
                    "completion_rate": metrics.get("completion_rate", 0.0),
                    "macro_f1": metrics.get("macro_f1", 0.0),
                }
            )
        return entries

    # -- jobs ------------------------------------------------------------------

    def create_job(self, session_id: str, kind: str) -> str:
        job_id = uuid.uuid4().hex[:12]
        now = _now()
        with self._lock, self._connect() as conn:
            conn.execute(
                "INSERT INTO jobs VALUES (?, ?, ?, ?, NULL, ?, ?)",
                (job_id, session_id, kind, JOB_QUEUED, now, now),
            )
        return job_id

    def update_job(self, job_id: str, status: str, error: str | None = None) -> None:
        with self._lock, self._connect() as conn:
            conn.execute(
                "UPDATE jobs SET status = ?, error = ?, updated_at = ? WHERE job_id = ?",
                (status, error, _now(), job_id),
            )

    def get_job(self, job_id: str) -> dict | None:
        with self._connect() as conn:
            row = conn.execute("SELECT * FROM jobs WHERE job_id = ?", (job_id,)).fetchone()
        return dict(row) if row else None

    def running_job(self, session_id: str) -> dict | None:
        with self._connect() as conn:
            row = conn.execute(
                "SELECT * FROM jobs WHERE session_id = ? AND status IN (?, ?)",
                (session_id, JOB_QUEUED, JOB_RUNNING),
            ).fetchone()
        return dict(row) if row else None
