"""On-disk cache for graphforms."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import shutil
import tempfile
import threading
from pathlib import Path
from typing import TYPE_CHECKING, Any

from .graphs import from_dict, to_dict

if TYPE_CHECKING:
    from .graphcomplex import StratumBasis

logger = logging.getLogger(__name__)

CACHE_DIRNAME = ".graphforms"
CACHE_ENV = "GRAPHFORMS_CACHE"

_write_lock = threading.Lock()


def canonical_json(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def content_key(canonical_key: bytes | str, operation: str, params: dict) -> str:
    """sha256 over the canonical JSON of (graph key, operation, parameters)."""
    if isinstance(canonical_key, bytes):
        canonical_key = canonical_key.decode()
    blob = json.dumps(
        {"graph": canonical_key, "operation": operation, "params": params},
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(blob.encode()).hexdigest()


class Cache:
    """Cache strata and results in a .graphforms/ folder."""

    def __init__(self, base_path: Path | None = None):
        """Initialize the cache.

        Args:
            base_path: Directory holding .graphforms/. If None, uses
                      $GRAPHFORMS_CACHE, then searches for .graphforms/ by
                      walking up from the current directory.
        """
        if base_path is None:
            self.base_path = self.resolve_base_path()
        else:
            self.base_path = Path(base_path)
        self.storage_dir = self.base_path / CACHE_DIRNAME
        self.strata_dir = self.storage_dir / "strata"
        self.results_dir = self.storage_dir / "results"

    @classmethod
    def resolve_base_path(cls, explicit: str | Path | None = None) -> Path:
        """Pick the cache location: explicit path, environment, walk-up search, cwd."""
        if explicit:
            return Path(explicit)
        env = os.environ.get(CACHE_ENV)
        if env:
            return Path(env)
        return cls._find_cache_root() or Path.cwd()

    @staticmethod
    def _find_cache_root(start_path: Path | None = None) -> Path | None:
        """
        Find .graphforms/ folder by walking up directory tree.

        Args:
            start_path: Starting directory. Defaults to current directory.

        Returns:
            Path containing .graphforms/ folder, or None if not found.

        """
        current = (start_path or Path.cwd()).resolve()
        while True:
            if (current / CACHE_DIRNAME).is_dir():
                return current
            parent = current.parent
            if parent == current:
                return None
            current = parent

    def init(self) -> None:
        """Create the cache folders."""
        self.strata_dir.mkdir(parents=True, exist_ok=True)
        self.results_dir.mkdir(parents=True, exist_ok=True)

    def is_initialized(self) -> bool:
        return self.strata_dir.is_dir() and self.results_dir.is_dir()

    def clear(self) -> None:
        """Remove every cached file."""
        if self.storage_dir.exists():
            shutil.rmtree(self.storage_dir)

    def _stratum_file(self, h: int, e: int) -> Path:
        return self.strata_dir / f"h{h}_e{e}.json"

    def load_stratum(self, h: int, e: int) -> StratumBasis | None:
        """Load a cached stratum basis.

        Returns:
            The basis, or None on a cache miss.
        """
        from .graphcomplex import StratumBasis

        data = self._read(self._stratum_file(h, e))
        if data is None:
            logger.debug("stratum cache miss h=%d e=%d", h, e)
            return None
        logger.debug("stratum cache hit h=%d e=%d", h, e)
        return StratumBasis(
            h=data["h"],
            e=data["e"],
            graphs=tuple(from_dict(g) for g in data["graphs"]),
            keys=tuple(k.encode() for k in data["keys"]),
        )

    def save_stratum(self, h: int, e: int, basis: StratumBasis) -> None:
        self._write(
            self._stratum_file(h, e),
            {
                "h": h,
                "e": e,
                "graphs": [to_dict(g) for g in basis.graphs],
                "keys": [k.decode() for k in basis.keys],
            },
        )

    def load_result(self, key: str) -> Any | None:
        data = self._read(self.results_dir / f"{key}.json")
        logger.debug("result cache %s %s", "hit" if data is not None else "miss", key[:12])
        return data

    def save_result(self, key: str, payload: Any) -> None:
        self._write(self.results_dir / f"{key}.json", payload)

    def _read(self, path: Path) -> Any | None:
        if not path.exists():
            return None
        with open(path, encoding="utf-8") as f:
            return json.load(f)

    def _write(self, path: Path, payload: Any) -> None:
        """Write JSON atomically through a temporary file in the same folder.

        Args:
            path: Target file
            payload: JSON-serializable data
        """
        with _write_lock:
            self.init()
            fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as f:
                    f.write(canonical_json(payload))
                os.replace(tmp, path)
            except BaseException:
                Path(tmp).unlink(missing_ok=True)
                raise
