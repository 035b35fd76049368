"""Durable settings: one versioned JSON document, written atomically.

Secrets (protection passphrase, owner PIN) are persisted as salted
digests only. Export blobs carry location policies and guest profiles -
the shareable part of a configuration - and never any secret material;
imports ignore secret-looking fields with a warning rather than failing,
so a blob from a newer or hand-edited source still loads.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Mapping

from ..backup import BackupDestination
from ..engine import PrivacyEngine
from ..errors import SettingsCorruptError, ValidationError
from ..geopriv import LocationSettings
from ..guest import GuestProfile
from ..rpp import DEFAULT_ENABLED, RppVerb
from ..secret import SecretRecord

SCHEMA_VERSION = 1
EXPORT_KIND = "privdash-settings"


@dataclass
class SettingsDocument:
    schema_version: int = SCHEMA_VERSION
    location: LocationSettings = field(default_factory=LocationSettings)
    rpp_enabled: frozenset[RppVerb] = DEFAULT_ENABLED
    rpp_passphrase: SecretRecord | None = None
    rpp_previous: SecretRecord | None = None
    owner_pin: SecretRecord | None = None
    guest_profiles: list[GuestProfile] = field(default_factory=list)
    backup_destinations: list[BackupDestination] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "location": self.location.to_json(),
            "rpp": {
                "enabled_commands": sorted(v.value for v in self.rpp_enabled),
                "passphrase": self.rpp_passphrase.to_json() if self.rpp_passphrase else None,
                "previous_passphrase": self.rpp_previous.to_json() if self.rpp_previous else None,
            },
            "owner_pin": self.owner_pin.to_json() if self.owner_pin else None,
            "guest_profiles": [p.to_json() for p in self.guest_profiles],
            "backup_destinations": [d.to_json() for d in self.backup_destinations],
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "SettingsDocument":
        if not isinstance(doc, Mapping):
            raise ValidationError("settings must be an object", field="$", code="malformed")
        version = doc.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ValidationError(
                f"unsupported settings schema_version {version!r}",
                field="schema_version", code="unknown_version",
            )
        rpp_raw = doc.get("rpp", {})
        if not isinstance(rpp_raw, Mapping):
            raise ValidationError("rpp must be an object", field="rpp", code="malformed")
        enabled = frozenset(_parse_verb(v) for v in rpp_raw.get("enabled_commands", []))
        return cls(
            schema_version=SCHEMA_VERSION,
            location=LocationSettings.from_json(doc.get("location", {}), field="location"),
            rpp_enabled=enabled,
            rpp_passphrase=_parse_secret(rpp_raw.get("passphrase")),
            rpp_previous=_parse_secret(rpp_raw.get("previous_passphrase")),
            owner_pin=_parse_secret(doc.get("owner_pin")),
            guest_profiles=[
                GuestProfile.from_json(p, field_path=f"guest_profiles[{i}]")
                for i, p in enumerate(doc.get("guest_profiles", []))
            ],
            backup_destinations=[
                BackupDestination.from_json(d, field=f"backup_destinations[{i}]")
                for i, d in enumerate(doc.get("backup_destinations", []))
            ],
        )


def _parse_verb(value: str) -> RppVerb:
    try:
        return RppVerb(value)
    except ValueError:
        raise ValidationError(f"unknown command {value!r}", field="rpp.enabled_commands", code="unknown_verb") from None


def _parse_secret(raw) -> SecretRecord | None:
    if raw is None:
        return None
    if not isinstance(raw, Mapping) or "salt" not in raw or "digest" not in raw:
        raise ValidationError("secret record must carry salt and digest", field="secret", code="malformed")
    return SecretRecord.from_json(raw)


def save_settings(path: str, doc: SettingsDocument) -> None:
    """Serialize and atomically replace the settings file."""
    data = json.dumps(doc.to_json(), indent=2, sort_keys=True) + "\n"
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def load_settings(path: str) -> SettingsDocument:
    """Load persisted settings; corruption refuses with file and offset."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SettingsCorruptError(f"cannot read settings file {path!r}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SettingsCorruptError(
            f"settings file {path!r} is corrupt: {exc.msg} at line {exc.lineno} column {exc.colno} (offset {exc.pos})"
        ) from exc
    try:
        return SettingsDocument.from_json(raw)
    except ValidationError as exc:
        raise SettingsCorruptError(f"settings file {path!r} is invalid: {exc.message} (field {exc.field})") from exc


def engine_settings(engine: PrivacyEngine) -> SettingsDocument:
    """Snapshot the engine's durable state (sessions are deliberately excluded)."""
    return SettingsDocument(
        location=engine.location,
        rpp_enabled=engine.rpp_enabled,
        rpp_passphrase=engine.rpp_passphrase,
        rpp_previous=engine.rpp_previous,
        owner_pin=engine.owner_pin,
        guest_profiles=list(engine.profiles.values()),
        backup_destinations=list(engine.destinations),
    )


def apply_settings(engine: PrivacyEngine, doc: SettingsDocument) -> None:
    """Install persisted settings on a freshly built engine."""
    engine.location = doc.location
    engine.rpp_enabled = doc.rpp_enabled
    engine.rpp_passphrase = doc.rpp_passphrase
    engine.rpp_previous = doc.rpp_previous
    engine.rpp_state = engine.rpp_state.__class__(
        phase=engine.rpp_state.phase.__class__.ARMED if doc.rpp_passphrase else engine.rpp_state.phase.__class__.DISARMED
    )
    engine.owner_pin = doc.owner_pin
    engine.profiles = {p.profile_id: p for p in doc.guest_profiles}
    engine.destinations = list(doc.backup_destinations)


# --- Export / import -------------------------------------------------------------

# Fields that could smuggle secret material into or out of a shared blob.
_SECRET_FIELDS = ("rpp", "owner_pin", "passphrase", "previous_passphrase", "pin")


def export_settings(doc: SettingsDocument) -> dict:
    """The shareable blob: policies and profiles, never credentials."""
    return {
        "kind": EXPORT_KIND,
        "schema_version": SCHEMA_VERSION,
        "location": doc.location.to_json(),
        "guest_profiles": [p.to_json() for p in doc.guest_profiles],
    }


def import_settings(blob: Mapping) -> tuple[LocationSettings, list[GuestProfile], list[str]]:
    """Validate a shared blob; returns (location, profiles, warnings)."""
    if not isinstance(blob, Mapping):
        raise ValidationError("import blob must be an object", field="$", code="malformed")
    if blob.get("kind") != EXPORT_KIND:
        raise ValidationError(f"not a settings export (kind={blob.get('kind')!r})", field="kind", code="malformed")
    if blob.get("schema_version") != SCHEMA_VERSION:
        raise ValidationError(
            f"unsupported export schema_version {blob.get('schema_version')!r}",
            field="schema_version", code="unknown_version",
        )
    warnings = [
        f"ignored field {name!r}: credentials are never imported"
        for name in _SECRET_FIELDS if name in blob
    ]
    location = LocationSettings.from_json(blob.get("location", {}), field="location")
    profiles = [
        GuestProfile.from_json(p, field_path=f"guest_profiles[{i}]")
        for i, p in enumerate(blob.get("guest_profiles", []))
    ]
    return location, profiles, warnings
