"""Named-program store, shared by every session on a server.

Names are claimed when a program is first named, so two sessions can never
build programs with the same name concurrently; the claim becomes a real
entry when the program is finished.  With a directory configured, finished
programs persist as one JSON file each and are loaded back on startup.
"""

from __future__ import annotations

import threading
from pathlib import Path

from . import program as prog


class NotFound(KeyError):
    pass


def _filename(name: str) -> str:
    safe = "".join(ch if ch.isalnum() else "_" for ch in name)
    return f"{safe}.json"


class ProgramStore:
    def __init__(self, directory: str | Path | None = None):
        self._lock = threading.Lock()
        self._programs: dict[str, prog.Program] = {}
        self._claims: set[str] = set()
        self._directory = Path(directory) if directory else None
        if self._directory is not None:
            self._directory.mkdir(parents=True, exist_ok=True)
            for path in sorted(self._directory.glob("*.json")):
                loaded = prog.import_json(path.read_bytes())
                self._programs[loaded.name] = loaded

    def available(self, name: str) -> bool:
        with self._lock:
            return name not in self._programs and name not in self._claims

    def claim(self, name: str) -> bool:
        """Atomically reserve a name; False if it is already taken."""
        with self._lock:
            if name in self._programs or name in self._claims:
                return False
            self._claims.add(name)
            return True

    def release(self, name: str) -> None:
        with self._lock:
            self._claims.discard(name)

    def put(self, program: prog.Program) -> None:
        with self._lock:
            name = program.name
            if name in self._programs:
                raise prog.NameCollision(name)
            self._claims.discard(name)
            self._programs[name] = program
            if self._directory is not None:
                path = self._directory / _filename(name)
                path.write_bytes(prog.snapshot_json(program))

    def get(self, name: str) -> prog.Program:
        with self._lock:
            try:
                return self._programs[name]
            except KeyError:
                raise NotFound(name) from None

    def names(self) -> list:
        with self._lock:
            return sorted(self._programs)
