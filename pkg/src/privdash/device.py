"""Simulated mobile device: the substrate every privacy feature acts upon.

The device is a pure in-memory state machine. Operations never perform
I/O and never mutate their input; they return a new ``DeviceState`` (and,
where relevant, a list of declarative effects). Effects describe what a
real phone would do - turn on the lock screen, start the ringer, send an
SMS, wipe storage - and are applied back onto the state with
``apply_effect``. This keeps every feature testable without touching
hardware, telephony or a wall clock: the simulated clock only moves when
a caller hands in a timestamped input.

Transport queues (``inbound_sms`` / ``outbound_sms``) are the simulator's
transcript and are intentionally distinct from the ``SmsHistory`` data
store: delivering a message appends to the queue, it does not write a
store record. Wiping clears data stores, not the transcript, so tests can
still observe what happened.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Iterable, Mapping

from .errors import ValidationError

# Practical ceiling for a concatenated SMS; single messages are 160 chars
# but carriers stitch up to ~10 segments.
MAX_SMS_BODY = 1600


class LockState(Enum):
    UNLOCKED = "Unlocked"
    LOCKED = "Locked"
    WIPED = "Wiped"


class StoreKind(Enum):
    CONTACTS = "Contacts"
    CALL_HISTORY = "CallHistory"
    SMS_HISTORY = "SmsHistory"
    EMAILS = "Emails"
    PHOTOS = "Photos"
    BROWSER_HISTORY = "BrowserHistory"


class ResourceKind(Enum):
    WIFI = "WiFi"
    CELLULAR_DATA = "CellularData"


class Principal(Enum):
    OWNER = "Owner"
    GUEST = "Guest"


# Store records are opaque JSON objects; the engine treats them as
# immutable once ingested.
Record = dict[str, Any]


@dataclass(frozen=True)
class GeoFix:
    """A true position: lat in [-90, 90], lon normalized to [-180, 180)."""

    lat: float
    lon: float
    timestamp: float

    def __post_init__(self):
        if not isinstance(self.lat, (int, float)) or not -90.0 <= self.lat <= 90.0:
            raise ValidationError(f"latitude {self.lat!r} outside [-90, 90]", field="lat", code="out_of_range")
        if not isinstance(self.lon, (int, float)) or not -180.0 <= self.lon <= 180.0:
            raise ValidationError(f"longitude {self.lon!r} outside [-180, 180]", field="lon", code="out_of_range")
        object.__setattr__(self, "lat", float(self.lat))
        # Half-open interval: the antimeridian belongs to the west side.
        object.__setattr__(self, "lon", -180.0 if self.lon == 180.0 else float(self.lon))
        object.__setattr__(self, "timestamp", float(self.timestamp))


@dataclass(frozen=True)
class AppRecord:
    app_id: str
    display_name: str
    system_flag: bool = False


@dataclass(frozen=True)
class SmsMessage:
    sender: str
    body: str
    received_at: float

    def __post_init__(self):
        if len(self.body) > MAX_SMS_BODY:
            raise ValidationError(
                f"SMS body exceeds {MAX_SMS_BODY} characters", field="body", code="too_long"
            )


@dataclass(frozen=True)
class OutboundSms:
    to: str
    body: str
    sent_at: float


@dataclass(frozen=True)
class RingerState:
    volume: int = 50
    ringing: bool = False


# --- Effects -----------------------------------------------------------------
# Declarative outputs of engine operations; applied, not performed.


@dataclass(frozen=True)
class LockDevice:
    pass


@dataclass(frozen=True)
class StartRinger:
    volume: int


@dataclass(frozen=True)
class SendSms:
    to: str
    body: str


@dataclass(frozen=True)
class WipeData:
    pass


@dataclass(frozen=True)
class PositionReport:
    """One app-facing location read went through the policy dispatcher."""

    app_id: str
    lat: float | None
    lon: float | None


Effect = LockDevice | StartRinger | SendSms | WipeData | PositionReport


EMPTY_STORES: Mapping[StoreKind, tuple[Record, ...]] = {kind: () for kind in StoreKind}


@dataclass(frozen=True)
class DeviceState:
    apps: tuple[AppRecord, ...] = ()
    stores: Mapping[StoreKind, tuple[Record, ...]] = field(default_factory=lambda: dict(EMPTY_STORES))
    position: GeoFix | None = None
    lock: LockState = LockState.UNLOCKED
    ringer: RingerState = RingerState()
    inbound_sms: tuple[SmsMessage, ...] = ()
    outbound_sms: tuple[OutboundSms, ...] = ()
    resources: Mapping[ResourceKind, bool] = field(default_factory=lambda: {r: True for r in ResourceKind})
    clock: float = 0.0

    def app_by_id(self, app_id: str) -> AppRecord | None:
        for app in self.apps:
            if app.app_id == app_id:
                return app
        return None


# --- Operations --------------------------------------------------------------


def load_device(config: str | Mapping[str, Any]) -> DeviceState:
    """Build a DeviceState from a device-config document (JSON text or dict).

    Schema: ``{"apps": [{"app_id", "display_name", "system_flag"?}],
    "stores": {kind: [record, ...]}, "resources": {kind: bool},
    "position": {"lat", "lon", "timestamp"}?}``. Malformed input is
    rejected with the location of the fault; duplicate app_ids are named.
    """
    if isinstance(config, str):
        try:
            doc = json.loads(config)
        except json.JSONDecodeError as exc:
            raise ValidationError(
                f"device config is not valid JSON: {exc.msg} at line {exc.lineno} column {exc.colno}",
                field="$", code="malformed",
            ) from exc
    else:
        doc = config
    if not isinstance(doc, Mapping):
        raise ValidationError("device config must be a JSON object", field="$", code="malformed")

    raw_apps = doc.get("apps", [])
    if not isinstance(raw_apps, list):
        raise ValidationError("apps must be a list", field="apps", code="malformed")
    apps: list[AppRecord] = []
    seen: set[str] = set()
    for i, entry in enumerate(raw_apps):
        where = f"apps[{i}]"
        if not isinstance(entry, Mapping):
            raise ValidationError(f"{where} must be an object", field=where, code="malformed")
        app_id = entry.get("app_id")
        if not isinstance(app_id, str) or not app_id:
            raise ValidationError(f"{where}.app_id must be a non-empty string", field=f"{where}.app_id", code="malformed")
        if app_id in seen:
            raise ValidationError(f"duplicate app_id {app_id!r}", field=f"{where}.app_id", code="duplicate")
        seen.add(app_id)
        name = entry.get("display_name", app_id)
        if not isinstance(name, str):
            raise ValidationError(f"{where}.display_name must be a string", field=f"{where}.display_name", code="malformed")
        apps.append(AppRecord(app_id=app_id, display_name=name, system_flag=bool(entry.get("system_flag", False))))

    stores: dict[StoreKind, tuple[Record, ...]] = dict(EMPTY_STORES)
    raw_stores = doc.get("stores", {})
    if not isinstance(raw_stores, Mapping):
        raise ValidationError("stores must be an object", field="stores", code="malformed")
    for key, records in raw_stores.items():
        kind = parse_store_kind(key, field=f"stores.{key}")
        if not isinstance(records, list) or not all(isinstance(r, Mapping) for r in records):
            raise ValidationError(f"stores.{key} must be a list of objects", field=f"stores.{key}", code="malformed")
        stores[kind] = tuple(dict(r) for r in records)

    resources: dict[ResourceKind, bool] = {r: True for r in ResourceKind}
    raw_resources = doc.get("resources", {})
    if not isinstance(raw_resources, Mapping):
        raise ValidationError("resources must be an object", field="resources", code="malformed")
    for key, flag in raw_resources.items():
        resources[parse_resource_kind(key, field=f"resources.{key}")] = bool(flag)

    position = None
    if doc.get("position") is not None:
        raw_pos = doc["position"]
        if not isinstance(raw_pos, Mapping):
            raise ValidationError("position must be an object", field="position", code="malformed")
        position = GeoFix(
            lat=raw_pos.get("lat", 0.0), lon=raw_pos.get("lon", 0.0),
            timestamp=raw_pos.get("timestamp", 0.0),
        )

    clock = position.timestamp if position else 0.0
    return DeviceState(apps=tuple(apps), stores=stores, resources=resources, position=position, clock=clock)


def parse_store_kind(name: str, *, field: str = "kind") -> StoreKind:
    for kind in StoreKind:
        if kind.value == name:
            return kind
    raise ValidationError(f"unknown store kind {name!r}", field=field, code="unknown_kind")


def parse_resource_kind(name: str, *, field: str = "kind") -> ResourceKind:
    for kind in ResourceKind:
        if kind.value == name:
            return kind
    raise ValidationError(f"unknown resource kind {name!r}", field=field, code="unknown_kind")


def set_position(state: DeviceState, fix: GeoFix) -> DeviceState:
    """Replace the true position; the clock never moves backwards."""
    return replace(state, position=fix, clock=max(state.clock, fix.timestamp))


def receive_sms(state: DeviceState, msg: SmsMessage) -> DeviceState:
    """Append to the inbound queue (transport only - no store write)."""
    return replace(
        state,
        inbound_sms=state.inbound_sms + (msg,),
        clock=max(state.clock, msg.received_at),
    )


def store_records(state: DeviceState, kind: StoreKind) -> tuple[Record, ...]:
    return state.stores[kind]


def replace_store(state: DeviceState, kind: StoreKind, records: Iterable[Record]) -> DeviceState:
    stores = dict(state.stores)
    stores[kind] = tuple(records)
    return replace(state, stores=stores)


def apply_effect(state: DeviceState, effect: Effect) -> DeviceState:
    """Apply one declarative effect to the device substrate.

    Engine-level consequences of a wipe (clearing privacy settings) are
    the caller's job; this handles only the device itself.
    """
    if isinstance(effect, LockDevice):
        if state.lock is LockState.WIPED:
            return state
        return replace(state, lock=LockState.LOCKED)
    if isinstance(effect, StartRinger):
        volume = max(0, min(100, effect.volume))
        return replace(state, ringer=RingerState(volume=volume, ringing=True))
    if isinstance(effect, SendSms):
        out = OutboundSms(to=effect.to, body=effect.body, sent_at=state.clock)
        return replace(state, outbound_sms=state.outbound_sms + (out,))
    if isinstance(effect, WipeData):
        return replace(
            state,
            stores=dict(EMPTY_STORES),
            lock=LockState.WIPED,
            ringer=RingerState(volume=0, ringing=False),
            resources={r: True for r in ResourceKind},
        )
    if isinstance(effect, PositionReport):
        return state  # observational effect; feeds the event log only
    raise TypeError(f"unknown effect {effect!r}")


def parse_track(text: str) -> list[GeoFix]:
    """Parse a GPS track replay file: one ``timestamp lat lon`` per line.

    Blank lines and ``#`` comments are skipped. Faults are reported with
    their line number.
    """
    fixes: list[GeoFix] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValidationError(
                f"track line {lineno}: expected 'timestamp lat lon', got {len(parts)} fields",
                field=f"line {lineno}", code="malformed",
            )
        try:
            ts, lat, lon = (float(p) for p in parts)
        except ValueError as exc:
            raise ValidationError(
                f"track line {lineno}: {exc}", field=f"line {lineno}", code="malformed"
            ) from exc
        fixes.append(GeoFix(lat=lat, lon=lon, timestamp=ts))
    return fixes
