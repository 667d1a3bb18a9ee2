"""Content-addressed on-disk result cache.

One directory per cache key, one numbered version directory per (re)write:

    <root>/index.json                     package_id -> latest cache key
    <root>/<key>/v0001/meta.json
    <root>/<key>/v0001/modules/<module>/<view>.txt

Entries are immutable once written; writes go to a temp directory and are
renamed into place, so concurrent readers never observe partial state.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
import time
from dataclasses import dataclass
from pathlib import Path

VIEWS = ("bytecode", "disassembly", "low_level", "interface", "decompiled")


def cache_key(package_digest: str, model_id: str, prompt_version: str, arm: str) -> str:
    material = "\0".join((package_digest, model_id, prompt_version, arm))
    return hashlib.sha256(material.encode("utf-8")).hexdigest()


def package_digest(parts: list[bytes]) -> str:
    h = hashlib.sha256()
    for part in parts:
        h.update(hashlib.sha256(part).digest())
    return h.hexdigest()


@dataclass
class CacheEntry:
    key: str
    version: int
    path: Path
    meta: dict

    @property
    def modules(self) -> list[str]:
        return list(self.meta.get("modules", []))

    def view(self, module: str, view: str) -> str | None:
        f = self.path / "modules" / module / f"{view}.txt"
        return f.read_text("utf-8") if f.is_file() else None

    def views_of(self, module: str) -> dict[str, str]:
        return {v: self.view(module, v) or "" for v in VIEWS}


class CacheStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    # -- index -------------------------------------------------------------

    def _index_path(self) -> Path:
        return self.root / "index.json"

    def _read_index(self) -> dict[str, str]:
        p = self._index_path()
        if p.is_file():
            return json.loads(p.read_text("utf-8"))
        return {}

    def _update_index(self, package_id: str, key: str) -> None:
        with self._lock:
            index = self._read_index()
            index[package_id] = key
            tmp = self._index_path().with_suffix(".tmp")
            tmp.write_text(json.dumps(index, indent=2, sort_keys=True), "utf-8")
            os.replace(tmp, self._index_path())

    def key_for_package(self, package_id: str) -> str | None:
        return self._read_index().get(package_id)

    # -- entries -----------------------------------------------------------

    def latest(self, key: str) -> CacheEntry | None:
        key_dir = self.root / key
        if not key_dir.is_dir():
            return None
        versions = sorted(
            (d for d in key_dir.iterdir() if d.is_dir() and d.name.startswith("v")),
            key=lambda d: d.name,
        )
        for d in reversed(versions):
            meta_file = d / "meta.json"
            if meta_file.is_file():
                meta = json.loads(meta_file.read_text("utf-8"))
                return CacheEntry(key=key, version=int(d.name[1:]), path=d, meta=meta)
        return None

    def write(
        self,
        key: str,
        package_id: str,
        module_views: dict[str, dict[str, str]],
        meta: dict,
    ) -> CacheEntry:
        """Write a new immutable version for `key` and point the package index
        at it. meta is extended with modules/created_at."""
        key_dir = self.root / key
        key_dir.mkdir(parents=True, exist_ok=True)
        with self._lock:
            existing = [
                int(d.name[1:])
                for d in key_dir.iterdir()
                if d.is_dir() and d.name.startswith("v") and d.name[1:].isdigit()
            ]
            version = max(existing, default=0) + 1
            staging = Path(tempfile.mkdtemp(prefix=".staging-", dir=key_dir))
            try:
                full_meta = dict(meta)
                full_meta["modules"] = sorted(module_views)
                full_meta["created_at"] = time.time()
                full_meta["package_id"] = package_id
                for module, views in module_views.items():
                    mdir = staging / "modules" / module
                    mdir.mkdir(parents=True, exist_ok=True)
                    for view, text in views.items():
                        if view not in VIEWS:
                            raise ValueError(f"unknown view {view!r}")
                        (mdir / f"{view}.txt").write_text(text, "utf-8")
                (staging / "meta.json").write_text(
                    json.dumps(full_meta, indent=2, sort_keys=True), "utf-8"
                )
                final = key_dir / f"v{version:04d}"
                os.replace(staging, final)
            except Exception:
                import shutil

                shutil.rmtree(staging, ignore_errors=True)
                raise
        self._update_index(package_id, key)
        return CacheEntry(key=key, version=version, path=final, meta=full_meta)
