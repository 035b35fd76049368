"""Backup and restore of data stores to a user-chosen destination.

Whom you trust with your data is a choice: the default server, a named
provider, or your own machine. The archive format is a single JSON
document with a manifest (format version, creation time, per-store
record counts), a per-store payload, and a SHA-256 checksum over the
canonical payload bytes (sorted keys, compact separators, UTF-8). Any
tampering with the payload is detected before a restore touches the
device.

Remote destinations are simulated by an in-memory blob store speaking a
three-verb protocol (put/get/list); the service layer exposes the same
stores over HTTP. Local destinations write through a temp file and
rename, so a failed backup never leaves a readable partial archive.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .device import Record, StoreKind, parse_store_kind
from .errors import DestinationError, IntegrityError, ValidationError

FORMAT_VERSION = 1
CHECKSUM_ALGORITHM = "sha256"

DEFAULT_DESTINATION_ID = "default"
DEFAULT_ENDPOINT = "mem://default"


class DestinationKind(Enum):
    DEFAULT_SERVER = "default_server"
    PROVIDER = "provider"
    LOCAL_PATH = "local_path"


@dataclass(frozen=True)
class BackupDestination:
    dest_id: str
    kind: DestinationKind
    name: str
    endpoint: str | None = None  # default server / provider
    path: str | None = None      # local

    def __post_init__(self):
        if self.kind is DestinationKind.LOCAL_PATH:
            if not self.path:
                raise ValidationError("local destination requires a path", field="destination.path", code="missing_field")
        elif not self.endpoint:
            raise ValidationError("remote destination requires an endpoint", field="destination.endpoint", code="missing_field")

    def to_json(self) -> dict:
        out: dict = {"dest_id": self.dest_id, "kind": self.kind.value, "name": self.name}
        if self.endpoint is not None:
            out["endpoint"] = self.endpoint
        if self.path is not None:
            out["path"] = self.path
        return out

    @classmethod
    def from_json(cls, data: Mapping, *, field: str = "destination") -> "BackupDestination":
        if not isinstance(data, Mapping):
            raise ValidationError("destination must be an object", field=field, code="malformed")
        try:
            kind = DestinationKind(data.get("kind"))
        except ValueError:
            raise ValidationError(f"unknown destination kind {data.get('kind')!r}", field=f"{field}.kind", code="unknown_kind") from None
        dest_id = data.get("dest_id")
        if not isinstance(dest_id, str) or not dest_id:
            raise ValidationError("dest_id must be a non-empty string", field=f"{field}.dest_id", code="malformed")
        return cls(
            dest_id=dest_id,
            kind=kind,
            name=str(data.get("name", dest_id)),
            endpoint=data.get("endpoint"),
            path=data.get("path"),
        )


def default_destination() -> BackupDestination:
    return BackupDestination(
        dest_id=DEFAULT_DESTINATION_ID,
        kind=DestinationKind.DEFAULT_SERVER,
        name="Default server",
        endpoint=DEFAULT_ENDPOINT,
    )


def list_destinations(destinations: list[BackupDestination]) -> list[BackupDestination]:
    """Configured destinations; the non-removable default is always first."""
    rest = [d for d in destinations if d.dest_id != DEFAULT_DESTINATION_ID]
    return [default_destination()] + rest


@dataclass(frozen=True)
class BackupArchive:
    manifest: dict
    payload: dict[str, list[Record]]  # store-kind name -> records
    checksum: str

    @property
    def store_kinds(self) -> list[StoreKind]:
        return [parse_store_kind(name) for name in self.payload]


def canonical_payload_bytes(payload: Mapping[str, list[Record]]) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def build_archive(
    stores: Mapping[StoreKind, tuple[Record, ...]],
    selection: set[StoreKind],
    created_at: float,
) -> BackupArchive:
    if not selection:
        raise ValidationError("selection must name at least one store", field="stores", code="empty_selection")
    payload = {kind.value: [dict(r) for r in stores[kind]] for kind in sorted(selection, key=lambda k: k.value)}
    checksum = hashlib.sha256(canonical_payload_bytes(payload)).hexdigest()
    manifest = {
        "format_version": FORMAT_VERSION,
        "created_at": created_at,
        "stores": [{"kind": name, "count": len(records)} for name, records in payload.items()],
        "checksum_algorithm": CHECKSUM_ALGORITHM,
    }
    return BackupArchive(manifest=manifest, payload=payload, checksum=checksum)


def archive_to_bytes(archive: BackupArchive) -> bytes:
    doc = {"manifest": archive.manifest, "payload": archive.payload, "checksum": archive.checksum}
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def parse_archive(data: bytes) -> BackupArchive:
    """Decode and fully verify an archive; raises IntegrityError on any fault."""
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise IntegrityError(f"archive is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("manifest"), dict) or not isinstance(doc.get("payload"), dict):
        raise IntegrityError("archive missing manifest or payload")
    manifest, payload, checksum = doc["manifest"], doc["payload"], doc.get("checksum")
    if manifest.get("format_version") != FORMAT_VERSION:
        raise IntegrityError(f"unknown archive format version {manifest.get('format_version')!r}", code="unknown_version")
    if manifest.get("checksum_algorithm") != CHECKSUM_ALGORITHM:
        raise IntegrityError(f"unknown checksum algorithm {manifest.get('checksum_algorithm')!r}", code="unknown_version")
    recomputed = hashlib.sha256(canonical_payload_bytes(payload)).hexdigest()
    if checksum != recomputed:
        raise IntegrityError("payload checksum mismatch", code="checksum_mismatch")
    declared = {entry.get("kind"): entry.get("count") for entry in manifest.get("stores", [])}
    actual = {name: len(records) for name, records in payload.items()}
    if declared != actual:
        raise IntegrityError("manifest store counts do not match payload", code="count_mismatch")
    for name, records in payload.items():
        parse_store_kind(name, field=f"payload.{name}")
        if not isinstance(records, list) or not all(isinstance(r, dict) for r in records):
            raise IntegrityError(f"payload.{name} must be a list of objects")
    return BackupArchive(manifest=manifest, payload=payload, checksum=checksum)


# --- Blob stores ---------------------------------------------------------------


class MemoryBlobStore:
    """In-memory stand-in for a remote destination; 3 verbs: put/get/list.

    ``offline`` simulates an unreachable endpoint: every verb fails and
    nothing is stored.
    """

    def __init__(self):
        self._blobs: dict[str, bytes] = {}
        self.offline = False

    def _check(self):
        if self.offline:
            raise DestinationError("destination endpoint is unreachable")

    def put(self, key: str, data: bytes) -> None:
        self._check()
        self._blobs[key] = bytes(data)

    def get(self, key: str) -> bytes:
        self._check()
        if key not in self._blobs:
            raise DestinationError(f"no blob {key!r} at destination", code="not-found")
        return self._blobs[key]

    def list_keys(self) -> list[str]:
        self._check()
        return sorted(self._blobs)


class LocalDirStore:
    """Filesystem destination; writes are atomic (temp file + rename)."""

    def __init__(self, path: str):
        self.path = path

    def _check(self):
        if not os.path.isdir(self.path):
            raise DestinationError(f"destination path {self.path!r} is not a directory")

    def put(self, key: str, data: bytes) -> None:
        self._check()
        final = os.path.join(self.path, key)
        tmp = final + ".tmp"
        try:
            with open(tmp, "wb") as fh:
                fh.write(data)
            os.replace(tmp, final)
        except OSError as exc:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise DestinationError(f"cannot write archive to {final!r}: {exc}") from exc

    def get(self, key: str) -> bytes:
        self._check()
        try:
            with open(os.path.join(self.path, key), "rb") as fh:
                return fh.read()
        except OSError as exc:
            raise DestinationError(f"cannot read archive {key!r}: {exc}", code="not-found") from exc

    def list_keys(self) -> list[str]:
        self._check()
        return sorted(n for n in os.listdir(self.path) if not n.endswith(".tmp"))
