"""Session lifecycle, stage navigation, and snapshot persistence.

Every session lives in an in-memory cache and is written to
``<data_dir>/<session_id>.json`` after each mutation (snapshot-on-write), so
a killed process restarts from the last completed write. Mutations on one
session are serialized by a per-session lock; distinct sessions are fully
independent.
"""

from __future__ import annotations

import copy
import json
import threading
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterator, Optional

from .errors import (
    CorruptBlobError,
    IdCollisionError,
    NotFoundError,
    SerializationFailureError,
    StoreFullError,
    SummaryNotApprovedError,
    VersionMismatchError,
)
from .models import SessionState, Stage, check_invariants, new_id, utcnow

SNAPSHOT_FORMAT_VERSION = 1


class SessionStore:
    def __init__(self, data_dir: Path | str, max_sessions: int = 10_000):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.max_sessions = max_sessions
        self._sessions: dict[str, SessionState] = {}
        self._locks: dict[str, threading.RLock] = {}
        self._registry_lock = threading.Lock()
        # (session_id, group_id) pairs with an LLM generation in flight.
        # Runtime-only bookkeeping: never serialized, so a crash mid-call
        # restores with nothing pending.
        self._generating: set[tuple[str, str]] = set()

    # -- lifecycle ----------------------------------------------------------

    def create_session(self) -> SessionState:
        with self._registry_lock:
            if len(self._sessions) >= self.max_sessions:
                raise StoreFullError(
                    f"session capacity reached ({self.max_sessions}); delete sessions first"
                )
            state = SessionState(id=new_id())
            self._sessions[state.id] = state
            self._locks[state.id] = threading.RLock()
        self._persist(state)
        return copy.deepcopy(state)

    def get_session(self, session_id: str) -> SessionState:
        """Current state as a detached copy; callers cannot mutate the store."""
        with self._lock_for(session_id):
            return copy.deepcopy(self._live(session_id))

    def delete_session(self, session_id: str) -> None:
        with self._registry_lock:
            if session_id not in self._sessions and not self._snapshot_path(session_id).exists():
                raise NotFoundError(f"no session {session_id}")
            self._sessions.pop(session_id, None)
            self._locks.pop(session_id, None)
        self._snapshot_path(session_id).unlink(missing_ok=True)

    def session_ids(self) -> list[str]:
        with self._registry_lock:
            known = set(self._sessions)
        known.update(p.stem for p in self.data_dir.glob("*.json"))
        return sorted(known)

    # -- stage navigation ----------------------------------------------------

    def set_stage(self, session_id: str, target: Stage) -> SessionState:
        """Move to any stage; everything past Summarize needs an approved summary."""
        with self.mutate(session_id) as state:
            if target is not Stage.SUMMARIZE:
                if state.summary is None or not state.summary.approved:
                    raise SummaryNotApprovedError(
                        f"stage {target.value} requires an approved summary"
                    )
            state.stage = target
        return self.get_session(session_id)

    # -- mutation contract ----------------------------------------------------

    @contextmanager
    def mutate(self, session_id: str) -> Iterator[SessionState]:
        """Single-writer mutation scope: lock, yield live state, persist on exit.

        Raising inside the scope abandons the persist, but the live object may
        already be partially modified; operations validate preconditions before
        touching state.
        """
        with self._lock_for(session_id):
            state = self._live(session_id)
            yield state
            state.updated_at = utcnow()
            self._persist(state)

    # -- generation in-flight registry ---------------------------------------

    def begin_generation(self, session_id: str, group_id: str) -> bool:
        """Mark a group busy; False when a generation is already in flight."""
        key = (session_id, group_id)
        with self._registry_lock:
            if key in self._generating:
                return False
            self._generating.add(key)
            return True

    def end_generation(self, session_id: str, group_id: str) -> None:
        with self._registry_lock:
            self._generating.discard((session_id, group_id))

    def generation_in_flight(self, session_id: str, group_id: str) -> bool:
        with self._registry_lock:
            return (session_id, group_id) in self._generating

    # -- snapshots -------------------------------------------------------------

    def save_snapshot(self, session_id: str) -> dict[str, Any]:
        """Self-contained versioned snapshot of one session."""
        with self._lock_for(session_id):
            state = self._live(session_id)
            try:
                blob = {
                    "format_version": SNAPSHOT_FORMAT_VERSION,
                    "session": state.to_dict(),
                }
                json.dumps(blob)  # prove it serializes before handing it out
            except (TypeError, ValueError) as exc:
                raise SerializationFailureError(str(exc)) from exc
            return blob

    def restore_snapshot(self, blob: dict[str, Any]) -> SessionState:
        """Register the snapshot's session under its original id."""
        state = self._parse_snapshot(blob)
        with self._registry_lock:
            if state.id in self._sessions:
                raise IdCollisionError(f"session {state.id} already registered")
            if len(self._sessions) >= self.max_sessions:
                raise StoreFullError(f"session capacity reached ({self.max_sessions})")
            self._sessions[state.id] = state
            self._locks[state.id] = threading.RLock()
        self._persist(state)
        return copy.deepcopy(state)

    def flush_all(self) -> None:
        """Re-persist every cached session (shutdown safety net)."""
        with self._registry_lock:
            states = list(self._sessions.values())
        for state in states:
            self._persist(state)

    # -- internals --------------------------------------------------------------

    def _parse_snapshot(self, blob: Any) -> SessionState:
        if not isinstance(blob, dict):
            raise CorruptBlobError("snapshot must be a JSON object")
        version = blob.get("format_version")
        if version != SNAPSHOT_FORMAT_VERSION:
            raise VersionMismatchError(
                f"snapshot format_version {version!r} unsupported (expected {SNAPSHOT_FORMAT_VERSION})"
            )
        if "session" not in blob:
            raise CorruptBlobError("snapshot missing 'session'")
        state = SessionState.from_dict(blob["session"])
        try:
            check_invariants(state)
        except AssertionError as exc:
            raise CorruptBlobError(f"snapshot violates invariants: {exc}") from exc
        return state

    def _snapshot_path(self, session_id: str) -> Path:
        return self.data_dir / f"{session_id}.json"

    def _persist(self, state: SessionState) -> None:
        blob = {"format_version": SNAPSHOT_FORMAT_VERSION, "session": state.to_dict()}
        path = self._snapshot_path(state.id)
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(blob, indent=2), encoding="utf-8")
        tmp.replace(path)

    def _lock_for(self, session_id: str) -> threading.RLock:
        with self._registry_lock:
            lock = self._locks.get(session_id)
            if lock is None:
                # Unknown in memory: a snapshot file may exist (prior process).
                lock = threading.RLock()
                self._locks[session_id] = lock
        return lock

    def _live(self, session_id: str) -> SessionState:
        """Live state for use under the session lock, loading from disk if needed."""
        state = self._sessions.get(session_id)
        if state is not None:
            return state
        path = self._snapshot_path(session_id)
        if not path.exists():
            with self._registry_lock:
                self._locks.pop(session_id, None)
            raise NotFoundError(f"no session {session_id}")
        try:
            blob = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise CorruptBlobError(f"unreadable snapshot file {path.name}: {exc}") from exc
        state = self._parse_snapshot(blob)
        self._sessions[session_id] = state
        return state
