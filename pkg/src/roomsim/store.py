"""Persistence abstraction: JSON metadata documents plus named binary
artifacts, keyed by an opaque id.

The default implementation is file-backed (one directory per id with
``meta.json`` and an ``artifacts/`` folder) so state survives restarts; a
document database can be slotted in behind the same interface.  Metadata
writes are atomic (temp file + rename) and ids are listed in creation order.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
from abc import ABC, abstractmethod
from pathlib import Path

from .errors import RoomSimError


class StoreUnavailableError(RoomSimError):
    code = "store_unavailable"


class DocumentStore(ABC):
    """put/get/list/delete of JSON documents plus per-id binary artifacts."""

    @abstractmethod
    def put(self, doc_id: str, document: dict) -> None: ...

    @abstractmethod
    def get(self, doc_id: str) -> dict | None: ...

    @abstractmethod
    def list_ids(self) -> list[str]: ...

    @abstractmethod
    def delete(self, doc_id: str) -> None: ...

    @abstractmethod
    def put_artifact(self, doc_id: str, name: str, data: bytes) -> None: ...

    @abstractmethod
    def get_artifact(self, doc_id: str, name: str) -> bytes | None: ...


class FileStore(DocumentStore):
    """Directory-per-document store: ``<root>/<id>/meta.json`` + artifacts."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._lock = threading.Lock()
        try:
            self.root.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StoreUnavailableError(f"cannot create store root: {exc}") from exc

    @property
    def _index_path(self) -> Path:
        return self.root / ".index"

    def _doc_dir(self, doc_id: str) -> Path:
        if not doc_id or "/" in doc_id or doc_id.startswith("."):
            raise StoreUnavailableError(f"invalid document id {doc_id!r}")
        return self.root / doc_id

    def put(self, doc_id: str, document: dict) -> None:
        directory = self._doc_dir(doc_id)
        try:
            with self._lock:
                is_new = not directory.exists()
                directory.mkdir(parents=True, exist_ok=True)
                payload = json.dumps(document, indent=2, sort_keys=True)
                fd, tmp_name = tempfile.mkstemp(dir=directory, suffix=".tmp")
                with os.fdopen(fd, "w", encoding="utf-8") as handle:
                    handle.write(payload)
                os.replace(tmp_name, directory / "meta.json")
                if is_new:
                    with self._index_path.open("a", encoding="utf-8") as index:
                        index.write(doc_id + "\n")
        except OSError as exc:
            raise StoreUnavailableError(f"cannot write document {doc_id}: {exc}") from exc

    def get(self, doc_id: str) -> dict | None:
        path = self._doc_dir(doc_id) / "meta.json"
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            return None
        except OSError as exc:
            raise StoreUnavailableError(f"cannot read document {doc_id}: {exc}") from exc

    def list_ids(self) -> list[str]:
        try:
            if not self._index_path.exists():
                return self._rebuild_index()
            seen: list[str] = []
            for line in self._index_path.read_text(encoding="utf-8").splitlines():
                doc_id = line.strip()
                if doc_id and doc_id not in seen and (self.root / doc_id / "meta.json").exists():
                    seen.append(doc_id)
            return seen
        except OSError as exc:
            raise StoreUnavailableError(f"cannot list documents: {exc}") from exc

    def _rebuild_index(self) -> list[str]:
        entries = [
            (path.stat().st_mtime, path.name)
            for path in self.root.iterdir()
            if path.is_dir() and (path / "meta.json").exists()
        ]
        ids = [name for _, name in sorted(entries)]
        with self._index_path.open("w", encoding="utf-8") as index:
            index.writelines(doc_id + "\n" for doc_id in ids)
        return ids

    def delete(self, doc_id: str) -> None:
        import shutil

        directory = self._doc_dir(doc_id)
        try:
            if directory.exists():
                shutil.rmtree(directory)
        except OSError as exc:
            raise StoreUnavailableError(f"cannot delete document {doc_id}: {exc}") from exc

    def put_artifact(self, doc_id: str, name: str, data: bytes) -> None:
        directory = self._doc_dir(doc_id) / "artifacts"
        try:
            directory.mkdir(parents=True, exist_ok=True)
            fd, tmp_name = tempfile.mkstemp(dir=directory, suffix=".tmp")
            with os.fdopen(fd, "wb") as handle:
                handle.write(data)
            os.replace(tmp_name, directory / name)
        except OSError as exc:
            raise StoreUnavailableError(
                f"cannot write artifact {name} for {doc_id}: {exc}"
            ) from exc

    def get_artifact(self, doc_id: str, name: str) -> bytes | None:
        path = self._doc_dir(doc_id) / "artifacts" / name
        try:
            return path.read_bytes()
        except FileNotFoundError:
            return None
        except OSError as exc:
            raise StoreUnavailableError(
                f"cannot read artifact {name} for {doc_id}: {exc}"
            ) from exc
