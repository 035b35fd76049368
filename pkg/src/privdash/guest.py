"""Secondary-user (guest) mode: reusable profiles, substitution, exact restore.

A profile controls three groups: which apps stay visible, which data
stores are substituted with an empty view for the duration of the
session, and which resources (WiFi, cellular data) are gated. System
apps - settings and the dashboard itself - are never visible to a
guest, so a guest can never change the rules that constrain them.

Entering a session snapshots the protected stores and empties them;
anything a guest creates in a protected store lives only inside the
session and is discarded on exit, incognito-style. A profile that should
retain the guest's own data (say, a child's photos) simply leaves that
store unprotected. Stores outside the protection set are shared with
the owner unchanged.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .device import AppRecord, DeviceState, Record, ResourceKind, StoreKind, parse_resource_kind, parse_store_kind
from .errors import ValidationError


@dataclass(frozen=True)
class GuestProfile:
    profile_id: str
    name: str
    visible_apps: frozenset[str]
    protected_stores: frozenset[StoreKind]
    resource_overrides: Mapping[ResourceKind, bool] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "profile_id": self.profile_id,
            "name": self.name,
            "visible_apps": sorted(self.visible_apps),
            "protected_stores": sorted(k.value for k in self.protected_stores),
            "resource_overrides": {k.value: v for k, v in sorted(self.resource_overrides.items(), key=lambda kv: kv[0].value)},
        }

    @classmethod
    def from_json(cls, data: Mapping, *, field_path: str = "profile") -> "GuestProfile":
        if not isinstance(data, Mapping):
            raise ValidationError("profile must be an object", field=field_path, code="malformed")
        profile_id = data.get("profile_id")
        if not isinstance(profile_id, str) or not profile_id:
            raise ValidationError("profile_id must be a non-empty string", field=f"{field_path}.profile_id", code="malformed")
        visible = data.get("visible_apps", [])
        if not isinstance(visible, list) or not all(isinstance(a, str) for a in visible):
            raise ValidationError("visible_apps must be a list of app ids", field=f"{field_path}.visible_apps", code="malformed")
        protected = data.get("protected_stores", [])
        if not isinstance(protected, list):
            raise ValidationError("protected_stores must be a list", field=f"{field_path}.protected_stores", code="malformed")
        overrides_raw = data.get("resource_overrides", {})
        if not isinstance(overrides_raw, Mapping):
            raise ValidationError("resource_overrides must be an object", field=f"{field_path}.resource_overrides", code="malformed")
        return cls(
            profile_id=profile_id,
            name=str(data.get("name", profile_id)),
            visible_apps=frozenset(visible),
            protected_stores=frozenset(
                parse_store_kind(k, field=f"{field_path}.protected_stores") for k in protected
            ),
            resource_overrides={
                parse_resource_kind(k, field=f"{field_path}.resource_overrides"): bool(v)
                for k, v in overrides_raw.items()
            },
        )


@dataclass
class GuestSession:
    """At most one active per device; owns the pre-entry snapshot."""

    profile_id: str
    snapshot: dict[StoreKind, tuple[Record, ...]]
    resources_before: dict[ResourceKind, bool]
    entered_at: float


@dataclass(frozen=True)
class VisibleState:
    """What the current holder of the phone can see."""

    apps: tuple[AppRecord, ...]
    stores: Mapping[StoreKind, tuple[Record, ...]]
    resources: Mapping[ResourceKind, bool]
    session_active: bool
    profile_id: str | None


def sanitize_profile(profile: GuestProfile, apps: Iterable[AppRecord]) -> tuple[GuestProfile, list[str]]:
    """Strip system-flagged apps from visibility, warning per removal.

    App ids with no matching installed app are tolerated (profiles are
    reusable across device reconfigurations); they simply never show.
    """
    system_ids = {a.app_id for a in apps if a.system_flag}
    blocked = sorted(profile.visible_apps & system_ids)
    warnings = [f"app {app_id!r} is a system app and cannot be visible to guests" for app_id in blocked]
    if blocked:
        profile = GuestProfile(
            profile_id=profile.profile_id,
            name=profile.name,
            visible_apps=profile.visible_apps - system_ids,
            protected_stores=profile.protected_stores,
            resource_overrides=profile.resource_overrides,
        )
    return profile, warnings


def take_snapshot(device: DeviceState, profile: GuestProfile) -> dict[StoreKind, tuple[Record, ...]]:
    """Deep copy of exactly the protected stores, for bit-exact restore."""
    return {kind: copy.deepcopy(device.stores[kind]) for kind in profile.protected_stores}


def visible_apps(device: DeviceState, profile: GuestProfile | None) -> tuple[AppRecord, ...]:
    """Owner sees everything; a guest sees the profile's allow-list minus system apps."""
    apps = sorted(device.apps, key=lambda a: a.display_name.casefold())
    if profile is None:
        return tuple(apps)
    return tuple(a for a in apps if a.app_id in profile.visible_apps and not a.system_flag)


def effective_view(
    device: DeviceState, session: GuestSession | None, profile: GuestProfile | None
) -> VisibleState:
    """Owner view with no session; profile-scoped view while one is active.

    During a session the device's live stores already hold the guest
    substitution (the engine swapped them at entry), so the store map is
    the live one either way; what changes is app visibility and the
    resource map.
    """
    if session is None or profile is None:
        return VisibleState(
            apps=visible_apps(device, None),
            stores=dict(device.stores),
            resources=dict(device.resources),
            session_active=False,
            profile_id=None,
        )
    return VisibleState(
        apps=visible_apps(device, profile),
        stores=dict(device.stores),
        resources=dict(device.resources),
        session_active=True,
        profile_id=profile.profile_id,
    )


def search_apps(device: DeviceState, profile: GuestProfile | None, query: str) -> tuple[AppRecord, ...]:
    """The internal search engine: hidden apps do not match anything."""
    needle = query.casefold()
    return tuple(
        a for a in visible_apps(device, profile)
        if needle in a.display_name.casefold() or needle in a.app_id.casefold()
    )
