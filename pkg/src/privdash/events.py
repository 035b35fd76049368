"""Append-only event feed: one record per engine effect plus lifecycle events.

Sequence numbers start at 1 and are strictly increasing; clients poll
with a ``since`` cursor. Effects map 1:1 onto event kinds; the engine
adds lifecycle records (inbound SMS, guest transitions, backups,
settings changes) that have no device effect.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .device import Effect, LockDevice, PositionReport, SendSms, StartRinger, WipeData


class EventKind(Enum):
    SMS_IN = "SmsIn"
    SMS_OUT = "SmsOut"
    LOCKED = "Locked"
    RINGING = "Ringing"
    WIPED = "Wiped"
    GUEST_ENTERED = "GuestEntered"
    GUEST_EXITED = "GuestExited"
    LOCATION_QUERIED = "LocationQueried"
    BACKUP_CREATED = "BackupCreated"
    SETTINGS_CHANGED = "SettingsChanged"


@dataclass(frozen=True)
class EventRecord:
    seq: int
    timestamp: float
    kind: EventKind
    detail: dict

    def to_json(self) -> dict:
        return {"seq": self.seq, "timestamp": self.timestamp, "kind": self.kind.value, "detail": self.detail}


class EventLog:
    def __init__(self):
        self._records: list[EventRecord] = []

    def append(self, kind: EventKind, detail: dict, *, timestamp: float) -> EventRecord:
        record = EventRecord(seq=len(self._records) + 1, timestamp=timestamp, kind=kind, detail=detail)
        self._records.append(record)
        return record

    def since(self, seq: int) -> list[EventRecord]:
        # seq values are dense from 1, so this is just a slice
        return self._records[max(0, seq):]

    @property
    def latest_seq(self) -> int:
        return len(self._records)

    def __len__(self) -> int:
        return len(self._records)


def event_for_effect(effect: Effect) -> tuple[EventKind, dict]:
    if isinstance(effect, LockDevice):
        return EventKind.LOCKED, {}
    if isinstance(effect, StartRinger):
        return EventKind.RINGING, {"volume": effect.volume}
    if isinstance(effect, SendSms):
        return EventKind.SMS_OUT, {"to": effect.to, "body": effect.body}
    if isinstance(effect, WipeData):
        return EventKind.WIPED, {}
    if isinstance(effect, PositionReport):
        return EventKind.LOCATION_QUERIED, {"app_id": effect.app_id, "lat": effect.lat, "lon": effect.lon}
    raise TypeError(f"unknown effect {effect!r}")
