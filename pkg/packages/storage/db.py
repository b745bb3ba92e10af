from __future__ import annotations

import json
import sqlite3
import time
from contextlib import contextmanager
from typing import Any, Dict, Iterable, List, Optional

SCHEMA_SQL = """
CREATE TABLE IF NOT EXISTS reports (
    key TEXT PRIMARY KEY,
    kind TEXT NOT NULL,
    payload_json TEXT NOT NULL,
    created_at REAL NOT NULL
);

CREATE INDEX IF NOT EXISTS reports_kind_created ON reports (kind, created_at);
"""


def _utc_now_ts() -> float:
    return time.time()


def report_key(kind: str, request: Dict[str, Any]) -> str:
    """Stable cache key for a request payload."""
    return f"{kind}:" + json.dumps(request, sort_keys=True, separators=(",", ":"))


class Storage:
    def __init__(self, path: str) -> None:
        self.path = path
        self._init_db()

    @contextmanager
    def _connect(self) -> Iterable[sqlite3.Connection]:
        conn = sqlite3.connect(self.path, timeout=30)
        conn.row_factory = sqlite3.Row
        try:
            yield conn
            conn.commit()
        finally:
            conn.close()

    def _init_db(self) -> None:
        with self._connect() as conn:
            conn.executescript(SCHEMA_SQL)

    def get_report(self, key: str, max_age_seconds: Optional[float] = None) -> Optional[Dict[str, Any]]:
        with self._connect() as conn:
            row = conn.execute(
                "SELECT payload_json, created_at FROM reports WHERE key = ?",
                (key,),
            ).fetchone()
        if not row:
            return None
        if max_age_seconds is not None and _utc_now_ts() - float(row["created_at"]) > max_age_seconds:
            return None
        try:
            return json.loads(row["payload_json"])
        except json.JSONDecodeError:
            return None

    def save_report(self, key: str, kind: str, payload: Dict[str, Any]) -> None:
        now = _utc_now_ts()
        with self._connect() as conn:
            conn.execute(
                "INSERT INTO reports (key, kind, payload_json, created_at) VALUES (?, ?, ?, ?) "
                "ON CONFLICT(key) DO UPDATE SET kind=excluded.kind, payload_json=excluded.payload_json, "
                "created_at=excluded.created_at",
                (key, kind, json.dumps(payload), now),
            )

    def list_reports(self, kind: Optional[str] = None, limit: int = 100) -> List[Dict[str, Any]]:
        params: List[Any] = []
        where_clause = ""
        if kind:
            where_clause = "WHERE kind = ?"
            params.append(kind)
        params.append(limit)
        with self._connect() as conn:
            rows = conn.execute(
                f"SELECT key, kind, payload_json, created_at FROM reports {where_clause} "
                "ORDER BY created_at DESC LIMIT ?",
                params,
            ).fetchall()
        return [self._row_to_report(row) for row in rows]

    def clear_reports(self, kind: Optional[str] = None) -> int:
        with self._connect() as conn:
            if kind:
                cur = conn.execute("DELETE FROM reports WHERE kind = ?", (kind,))
            else:
                cur = conn.execute("DELETE FROM reports")
        return int(cur.rowcount)

    @staticmethod
    def _row_to_report(row: sqlite3.Row) -> Dict[str, Any]:
        try:
            payload = json.loads(row["payload_json"]) if row["payload_json"] else {}
        except json.JSONDecodeError:
            payload = {}
        return {
            "key": row["key"],
            "kind": row["kind"],
            "payload": payload,
            "created_at": row["created_at"],
        }
