"""The privacy engine: one serialized command stream over the simulated device.

Everything that mutates state funnels through an instance of
``PrivacyEngine``. Each command validates its input, applies declarative
effects onto the device, appends event records (one per effect, plus
lifecycle events), and invokes the persistence hook when durable
settings changed. Reads hand out immutable snapshots.

The engine itself is not thread-safe; the service layer serializes
commands with a lock. Pure helpers (parsing, quantization) are safe to
call from anywhere.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Any, Callable, Iterable, Mapping

from . import backup as bk
from . import guest as gst
from . import rpp
from .device import (
    DeviceState,
    Effect,
    GeoFix,
    LockState,
    PositionReport,
    Principal,
    Record,
    RingerState,
    SmsMessage,
    StoreKind,
    WipeData,
    apply_effect,
    receive_sms,
    replace_store,
    set_position as device_set_position,
)
from .errors import AuthError, ConflictError, NotFoundError, ValidationError
from .events import EventKind, EventLog, event_for_effect
from .geopriv import (
    LocationSettings,
    ReportedLocation,
    apply_policy,
    resolve_policy,
    unknown_exception_ids,
)
from .secret import SecretRecord


class PrivacyEngine:
    def __init__(
        self,
        device: DeviceState,
        *,
        location: LocationSettings | None = None,
        rpp_enabled: frozenset[rpp.RppVerb] = rpp.DEFAULT_ENABLED,
        rpp_passphrase: SecretRecord | None = None,
        rpp_previous: SecretRecord | None = None,
        owner_pin: SecretRecord | None = None,
        profiles: Iterable[gst.GuestProfile] = (),
        destinations: Iterable[bk.BackupDestination] = (),
    ):
        self.device = device
        self.location = location if location is not None else LocationSettings()
        self.rpp_enabled = frozenset(rpp_enabled)
        self.rpp_passphrase = rpp_passphrase
        self.rpp_previous = rpp_previous
        self.rpp_state = rpp.RppState(
            phase=rpp.RppPhase.ARMED if rpp_passphrase is not None else rpp.RppPhase.DISARMED
        )
        self.owner_pin = owner_pin
        self.profiles: dict[str, gst.GuestProfile] = {p.profile_id: p for p in profiles}
        self.destinations: list[bk.BackupDestination] = [
            d for d in destinations if d.dest_id != bk.DEFAULT_DESTINATION_ID
        ]
        self.session: gst.GuestSession | None = None
        self.events = EventLog()
        # Counts raw reads of the position source; the uniform-dispatch
        # guarantee is "exactly one read per query, whatever the policy".
        self.position_reads = 0
        self._memory_stores: dict[str, bk.MemoryBlobStore] = {}
        self._backup_counter = 0
        # Persistence hook; the service installs a write-through saver.
        self.on_settings_changed: Callable[[str], None] | None = None

    # --- internals -----------------------------------------------------------

    @property
    def now(self) -> float:
        return self.device.clock

    def _rpp_config(self) -> rpp.RppConfig | None:
        if self.rpp_passphrase is None:
            return None
        return rpp.RppConfig(
            passphrase=self.rpp_passphrase,
            previous_passphrase=self.rpp_previous,
            enabled_commands=self.rpp_enabled,
        )

    def _emit(self, kind: EventKind, detail: dict) -> None:
        self.events.append(kind, detail, timestamp=self.now)

    def _apply_effects(self, effects: Iterable[Effect]) -> None:
        for effect in effects:
            self.device = apply_effect(self.device, effect)
            self._emit(*event_for_effect(effect))
            if isinstance(effect, WipeData):
                self._wipe_cascade()

    def _wipe_cascade(self) -> None:
        # Device stores were already emptied by the effect; clear every
        # privacy setting so nothing survives on a wiped phone.
        self.rpp_passphrase = None
        self.rpp_previous = None
        self.rpp_enabled = rpp.DEFAULT_ENABLED
        self.rpp_state = rpp.RppState(phase=rpp.RppPhase.WIPED)
        self.location = LocationSettings()
        self.profiles = {}
        self.session = None
        self.destinations = []
        self.owner_pin = None
        if self.on_settings_changed:
            self.on_settings_changed("wipe")

    def _settings_changed(self, section: str) -> None:
        self._emit(EventKind.SETTINGS_CHANGED, {"section": section})
        if self.on_settings_changed:
            self.on_settings_changed(section)

    def verify_owner(self, auth: str) -> None:
        """Owner credential: the protection passphrase when armed, else the PIN."""
        if self.rpp_passphrase is not None:
            folded = rpp.fold_token(auth)
            if folded is not None and self.rpp_passphrase.matches(folded):
                return
            raise AuthError("owner authentication failed")
        if self.owner_pin is not None:
            if self.owner_pin.matches(auth):
                return
            raise AuthError("owner authentication failed")
        raise AuthError(
            "no owner credential configured; set a protection passphrase or owner PIN first",
            code="auth-unavailable",
        )

    # --- device substrate ------------------------------------------------------

    def set_position(self, fix: GeoFix) -> None:
        self.device = device_set_position(self.device, fix)

    def replay_track(self, fixes: Iterable[GeoFix]) -> int:
        count = 0
        for fix in fixes:
            self.set_position(fix)
            count += 1
        return count

    def deliver_sms(self, msg: SmsMessage) -> list[Effect]:
        """Store an inbound SMS and run it through remote protection."""
        self.device = receive_sms(self.device, msg)
        # events feed the UI: never surface a passphrase token
        self._emit(EventKind.SMS_IN, {"sender": msg.sender, "body": rpp.redact_body(msg.body)})
        self.rpp_state, effects = rpp.handle_inbound(
            self.rpp_state, self._rpp_config(), msg, self.device.position, now=self.now
        )
        self._apply_effects(effects)
        return effects

    def query_store(self, kind: StoreKind, viewer: Principal = Principal.OWNER) -> tuple[Record, ...]:
        """Current store contents; during a guest session the live store
        already holds the substitution, whoever asks."""
        return self.device.stores[kind]

    def add_record(self, kind: StoreKind, record: Mapping[str, Any]) -> int:
        """Append one record to a store (guest-scoped while a session is active)."""
        if not isinstance(record, Mapping):
            raise ValidationError("record must be an object", field="record", code="malformed")
        records = self.device.stores[kind] + (dict(record),)
        self.device = replace_store(self.device, kind, records)
        return len(records)

    def local_unlock(self, entered: str) -> bool:
        """Owner types the passphrase on the device's lock screen."""
        if self.device.lock is not LockState.LOCKED:
            raise ConflictError("device is not locked")
        self.rpp_state, unlocked = rpp.local_unlock(
            self.rpp_state, self._rpp_config(), entered, now=self.now
        )
        if unlocked:
            self.device = replace(
                self.device,
                lock=LockState.UNLOCKED,
                ringer=RingerState(volume=self.device.ringer.volume, ringing=False),
            )
        return unlocked

    # --- location --------------------------------------------------------------

    def query_location(self, app_id: str) -> ReportedLocation:
        """What the named app sees right now.

        The true fix is read exactly once per query regardless of
        policy, so response timing cannot reveal which policy an app is
        under.
        """
        self.position_reads += 1
        fix = self.device.position
        if fix is None:
            raise ConflictError("no position fix available", code="no-position")
        policy = resolve_policy(self.location, app_id)
        reported = apply_policy(fix, policy)
        self._apply_effects([PositionReport(app_id=app_id, lat=reported.lat, lon=reported.lon)])
        return reported

    def set_location_settings(self, settings: LocationSettings) -> list[str]:
        """Replace the location settings; unknown exception ids are kept but flagged."""
        self.location = settings
        warnings = [
            f"exception references unknown app {app_id!r}"
            for app_id in unknown_exception_ids(settings, self.device.apps)
        ]
        self._settings_changed("location")
        return warnings

    # --- remote protection -------------------------------------------------------

    def rpp_status(self) -> dict:
        return {
            "armed": self.rpp_passphrase is not None,
            "phase": self.rpp_state.phase.value,
            "enabled_commands": sorted(v.value for v in self.rpp_enabled),
            "failed_attempts": self.rpp_state.failed_attempts,
            "backoff_until": self.rpp_state.backoff_until,
        }

    def set_rpp_enabled(self, verbs: Iterable[rpp.RppVerb]) -> None:
        self.rpp_enabled = frozenset(verbs)
        self._settings_changed("rpp")

    def set_passphrase(self, new: str) -> None:
        """First-time arm or forced rotation; completes AwaitingNewPassphrase."""
        config = rpp.set_passphrase(self._rpp_config(), new)
        self.rpp_passphrase = config.passphrase
        self.rpp_previous = config.previous_passphrase
        self.rpp_state = rpp.RppState(phase=rpp.RppPhase.ARMED)
        self._settings_changed("rpp")

    def set_owner_pin(self, pin: str) -> None:
        if not 1 <= len(pin) <= 100:
            raise ValidationError("pin length must be within [1, 100]", field="pin", code="out_of_range")
        self.owner_pin = SecretRecord.create(pin)
        self._settings_changed("owner_pin")

    # --- guest mode ---------------------------------------------------------------

    def create_profile(self, profile: gst.GuestProfile) -> tuple[gst.GuestProfile, list[str]]:
        if profile.profile_id in self.profiles:
            raise ValidationError(
                f"profile id {profile.profile_id!r} already exists",
                field="profile_id", code="duplicate",
            )
        profile, warnings = gst.sanitize_profile(profile, self.device.apps)
        self.profiles[profile.profile_id] = profile
        self._settings_changed("guest_profiles")
        return profile, warnings

    def delete_profile(self, profile_id: str) -> None:
        if self.session is not None and self.session.profile_id == profile_id:
            raise ConflictError("profile is in use by the active session")
        if profile_id not in self.profiles:
            raise NotFoundError(f"no profile {profile_id!r}")
        del self.profiles[profile_id]
        self._settings_changed("guest_profiles")

    def enter_guest(self, profile_id: str, auth: str) -> None:
        if self.session is not None:
            raise ConflictError("a guest session is already active")
        profile = self.profiles.get(profile_id)
        if profile is None:
            raise NotFoundError(f"no profile {profile_id!r}")
        self.verify_owner(auth)
        # Re-sanitize against the current app registry; profiles are
        # reusable and the registry may have changed since creation.
        profile, _ = gst.sanitize_profile(profile, self.device.apps)
        self.profiles[profile_id] = profile
        snapshot = gst.take_snapshot(self.device, profile)
        self.session = gst.GuestSession(
            profile_id=profile_id,
            snapshot=snapshot,
            resources_before=dict(self.device.resources),
            entered_at=self.now,
        )
        for kind in profile.protected_stores:
            self.device = replace_store(self.device, kind, ())
        resources = dict(self.device.resources)
        resources.update(profile.resource_overrides)
        self.device = replace(self.device, resources=resources)
        self._emit(EventKind.GUEST_ENTERED, {"profile_id": profile_id})

    def exit_guest(self, auth: str) -> None:
        if self.session is None:
            raise ConflictError("no active guest session")
        self.verify_owner(auth)
        session = self.session
        for kind, records in session.snapshot.items():
            self.device = replace_store(self.device, kind, records)
        self.device = replace(self.device, resources=dict(session.resources_before))
        self.session = None
        self._emit(EventKind.GUEST_EXITED, {"profile_id": session.profile_id})

    def _active_profile(self) -> gst.GuestProfile | None:
        return self.profiles.get(self.session.profile_id) if self.session else None

    def effective_view(self) -> gst.VisibleState:
        return gst.effective_view(self.device, self.session, self._active_profile())

    def search_apps(self, query: str) -> tuple:
        return gst.search_apps(self.device, self._active_profile(), query)

    # --- backup ---------------------------------------------------------------------

    def list_destinations(self) -> list[bk.BackupDestination]:
        return bk.list_destinations(self.destinations)

    def add_destination(self, dest: bk.BackupDestination) -> None:
        if any(d.dest_id == dest.dest_id for d in self.list_destinations()):
            raise ValidationError(f"destination id {dest.dest_id!r} already exists", field="dest_id", code="duplicate")
        self.destinations.append(dest)
        self._settings_changed("backup_destinations")

    def remove_destination(self, dest_id: str) -> None:
        if dest_id == bk.DEFAULT_DESTINATION_ID:
            raise ConflictError("the default destination is not removable")
        remaining = [d for d in self.destinations if d.dest_id != dest_id]
        if len(remaining) == len(self.destinations):
            raise NotFoundError(f"no destination {dest_id!r}")
        self.destinations = remaining
        self._settings_changed("backup_destinations")

    def _destination(self, dest_id: str) -> bk.BackupDestination:
        for dest in self.list_destinations():
            if dest.dest_id == dest_id:
                return dest
        raise NotFoundError(f"no destination {dest_id!r}")

    def blob_store(self, endpoint: str) -> bk.MemoryBlobStore:
        """The simulated remote store behind an endpoint (creating it on first use)."""
        if endpoint not in self._memory_stores:
            self._memory_stores[endpoint] = bk.MemoryBlobStore()
        return self._memory_stores[endpoint]

    def _store_for(self, dest: bk.BackupDestination):
        if dest.kind is bk.DestinationKind.LOCAL_PATH:
            return bk.LocalDirStore(dest.path)
        return self.blob_store(dest.endpoint)

    def create_backup(self, selection: set[StoreKind], dest_id: str) -> tuple[bk.BackupArchive, str]:
        """Archive the selected stores to a destination; returns (archive, key)."""
        dest = self._destination(dest_id)
        archive = bk.build_archive(self.device.stores, selection, created_at=self.now)
        data = bk.archive_to_bytes(archive)
        self._backup_counter += 1
        key = f"backup-{self._backup_counter:04d}-{rpp.iso_utc(self.now).replace(':', '')}.json"
        self._store_for(dest).put(key, data)  # atomic per store; raises on unreachable
        self._emit(
            EventKind.BACKUP_CREATED,
            {
                "destination_id": dest_id,
                "key": key,
                "checksum": archive.checksum,
                "stores": sorted(k.value for k in selection),
            },
        )
        return archive, key

    def fetch_backup(self, dest_id: str, key: str) -> bytes:
        return self._store_for(self._destination(dest_id)).get(key)

    def restore_backup(self, data: bytes, auth: str) -> list[StoreKind]:
        """Verify and apply an archive; all-or-nothing on the device stores."""
        if self.session is not None:
            raise ConflictError("cannot restore while a guest session is active")
        archive = bk.parse_archive(data)  # checksum/version/count verification
        self.verify_owner(auth)
        restored: list[StoreKind] = []
        device = self.device
        for kind in archive.store_kinds:
            device = replace_store(device, kind, tuple(dict(r) for r in archive.payload[kind.value]))
            restored.append(kind)
        self.device = device  # swap once: a failure above leaves state untouched
        return restored
