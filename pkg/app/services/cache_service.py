from typing import Any, Dict, List, Optional
from datetime import datetime
from pathlib import Path
import hashlib
import json
import logging
import os
import threading

logger = logging.getLogger(__name__)


class RecordCache:
    """Two-level cache of computed records: in memory, then one JSONL file per key."""

    def __init__(self, cache_dir: str, enabled: bool = True):
        self._dir = Path(cache_dir)
        self._enabled = enabled
        self._cache: Dict[str, List[Dict[str, Any]]] = {}
        self._cache_metadata: Dict[str, Dict[str, Any]] = {}
        self._lock = threading.Lock()

    @staticmethod
    def key_for(config: Dict[str, Any]) -> str:
        """md5 of the canonical JSON form of the producing configuration."""
        return hashlib.md5(json.dumps(config, sort_keys=True, default=str).encode()).hexdigest()

    def _path(self, key: str) -> Path:
        return self._dir / f"{key}.jsonl"

    def get(self, key: str) -> Optional[List[Dict[str, Any]]]:
        if not self._enabled:
            return None
        with self._lock:
            if key in self._cache:
                return self._cache[key]
            path = self._path(key)
            if not path.exists():
                return None
            try:
                with path.open(encoding="utf-8") as fh:
                    records = [json.loads(line) for line in fh if line.strip()]
            except (OSError, json.JSONDecodeError) as e:
                logger.warning("Discarding unreadable cache file %s: %s", path, e)
                return None
            self._remember(key, records, source="disk")
            return records

    def set(self, key: str, records: List[Dict[str, Any]]) -> None:
        if not self._enabled:
            return
        with self._lock:
            self._dir.mkdir(parents=True, exist_ok=True)
            path = self._path(key)
            tmp = path.with_suffix(".jsonl.tmp")
            with tmp.open("w", encoding="utf-8") as fh:
                for record in records:
                    fh.write(json.dumps(record, sort_keys=True) + "\n")
            os.replace(tmp, path)
            self._remember(key, records, source="computed")
            logger.debug("Cached %d records under %s", len(records), key)

    def _remember(self, key: str, records: List[Dict[str, Any]], source: str) -> None:
        self._cache[key] = records
        self._cache_metadata[key] = {
            "records": len(records),
            "source": source,
            "created_at": datetime.now().isoformat(),
        }

    def _invalidate(self, key: str) -> None:
        self._cache.pop(key, None)
        self._cache_metadata.pop(key, None)
        self._path(key).unlink(missing_ok=True)

    def invalidate(self, key: str) -> None:
        with self._lock:
            self._invalidate(key)

    def invalidate_all(self) -> None:
        """Clear memory and every cache file in the directory."""
        with self._lock:
            self._cache.clear()
            self._cache_metadata.clear()
            if self._dir.exists():
                for path in self._dir.glob("*.jsonl"):
                    path.unlink(missing_ok=True)

    def get_cache_stats(self) -> Dict[str, Any]:
        with self._lock:
            files = sorted(self._dir.glob("*.jsonl")) if self._dir.exists() else []
            return {
                "enabled": self._enabled,
                "cache_dir": str(self._dir),
                "entries_in_memory": len(self._cache),
                "files_on_disk": len(files),
                "total_size_bytes": sum(p.stat().st_size for p in files),
                "entries": dict(self._cache_metadata),
            }


def get_record_cache(cache_dir: str, enabled: bool = True) -> Optional[RecordCache]:
    return RecordCache(cache_dir, enabled) if enabled else None
