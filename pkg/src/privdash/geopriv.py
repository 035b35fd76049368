"""Adjustable location accuracy: per-app policies and grid quantization.

Four policy modes govern what an app sees when it asks for the device
position: nothing at all (``OFF``), the true fix (``PRECISE``), a
user-chosen constant (``FIXED``), or the center of the grid cell the
device is in (``BLUR``). Blurring is deterministic quantization, not
random jitter: as long as the device stays inside one cell, every query
returns the bit-identical point, so an app cannot average its way back
to the true position.

Grid construction: latitude rows of angular height ``dphi`` chosen so a
row spans exactly ``grid_km`` kilometers north-south; within a row,
longitude columns sized against the row's widest parallel (the edge
nearest the equator) so a cell is never wider than ``grid_km``
east-west. Rows and columns are half-open intervals indexed from -90 /
-180; a fix exactly on a boundary belongs to the larger-index side. For
fixes with |lat| <= 85 deg the reported point is guaranteed to lie
within ``grid_km * sqrt(2)/2 * 1.05`` of the true position; poleward of
that the cosine clamp keeps output well-formed but the bound is not
guaranteed.

All functions here are pure and safe for unrestricted parallel use.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Iterable, Mapping

from .device import AppRecord, GeoFix
from .errors import ValidationError

EARTH_RADIUS_KM = 6371.0088
MIN_GRID_KM = 1.0
MAX_GRID_KM = 500.0
# Below this cosine (≈ 89.4 deg) column width stops growing; keeps the
# construction finite at the poles.
COS_FLOOR = 0.01
# |lat| bound inside which the displacement guarantee holds.
GUARANTEE_ABS_LAT = 85.0


class PolicyMode(Enum):
    OFF = "off"
    PRECISE = "precise"
    FIXED = "fixed"
    BLUR = "blur"


class PlaceKind(Enum):
    CITY = "City"
    COUNTRY = "Country"
    CUSTOM = "Custom"


@dataclass(frozen=True)
class LocationPolicy:
    mode: PolicyMode
    # FIXED only:
    lat: float | None = None
    lon: float | None = None
    # BLUR only:
    grid_km: float | None = None

    def __post_init__(self):
        if self.mode is PolicyMode.FIXED:
            if self.lat is None or self.lon is None:
                raise ValidationError("fixed policy requires lat and lon", field="policy", code="missing_field")
            if not -90.0 <= self.lat <= 90.0:
                raise ValidationError(f"latitude {self.lat!r} outside [-90, 90]", field="policy.lat", code="out_of_range")
            if not -180.0 <= self.lon <= 180.0:
                raise ValidationError(f"longitude {self.lon!r} outside [-180, 180]", field="policy.lon", code="out_of_range")
            object.__setattr__(self, "lon", -180.0 if self.lon == 180.0 else float(self.lon))
            object.__setattr__(self, "lat", float(self.lat))
        elif self.mode is PolicyMode.BLUR:
            if self.grid_km is None:
                raise ValidationError("blur policy requires grid_km", field="policy.grid_km", code="missing_field")
            if not MIN_GRID_KM <= self.grid_km <= MAX_GRID_KM:
                raise ValidationError(
                    f"grid_km {self.grid_km!r} outside [{MIN_GRID_KM:g}, {MAX_GRID_KM:g}]",
                    field="policy.grid_km", code="out_of_range",
                )
            object.__setattr__(self, "grid_km", float(self.grid_km))
        else:
            if self.lat is not None or self.lon is not None or self.grid_km is not None:
                raise ValidationError(f"{self.mode.value} policy takes no parameters", field="policy", code="malformed")

    @classmethod
    def off(cls) -> "LocationPolicy":
        return cls(PolicyMode.OFF)

    @classmethod
    def precise(cls) -> "LocationPolicy":
        return cls(PolicyMode.PRECISE)

    @classmethod
    def fixed(cls, lat: float, lon: float) -> "LocationPolicy":
        return cls(PolicyMode.FIXED, lat=lat, lon=lon)

    @classmethod
    def blur(cls, grid_km: float) -> "LocationPolicy":
        return cls(PolicyMode.BLUR, grid_km=grid_km)

    def to_json(self) -> dict:
        out: dict = {"mode": self.mode.value}
        if self.mode is PolicyMode.FIXED:
            out["lat"] = self.lat
            out["lon"] = self.lon
        elif self.mode is PolicyMode.BLUR:
            out["grid_km"] = self.grid_km
        return out

    @classmethod
    def from_json(cls, data: Mapping, *, field: str = "policy") -> "LocationPolicy":
        if not isinstance(data, Mapping):
            raise ValidationError("policy must be an object", field=field, code="malformed")
        raw_mode = data.get("mode")
        try:
            mode = PolicyMode(raw_mode)
        except ValueError:
            raise ValidationError(f"unknown policy mode {raw_mode!r}", field=f"{field}.mode", code="unknown_mode") from None
        try:
            if mode is PolicyMode.FIXED:
                return cls(mode, lat=data.get("lat"), lon=data.get("lon"))
            if mode is PolicyMode.BLUR:
                return cls(mode, grid_km=data.get("grid_km"))
            return cls(mode)
        except ValidationError as exc:
            # re-anchor the field path at the caller's location
            raise ValidationError(exc.message, field=exc.field.replace("policy", field, 1) if exc.field else field, code=exc.code) from None


@dataclass
class LocationSettings:
    """Global default policy plus a per-app exception list."""

    global_default: LocationPolicy = field(default_factory=LocationPolicy.precise)
    exceptions: dict[str, LocationPolicy] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "global_default": self.global_default.to_json(),
            "exceptions": {app: p.to_json() for app, p in sorted(self.exceptions.items())},
        }

    @classmethod
    def from_json(cls, data: Mapping, *, field: str = "location") -> "LocationSettings":
        if not isinstance(data, Mapping):
            raise ValidationError("location settings must be an object", field=field, code="malformed")
        global_default = LocationPolicy.from_json(
            data.get("global_default", {"mode": "precise"}), field=f"{field}.global_default"
        )
        raw_exceptions = data.get("exceptions", {})
        if not isinstance(raw_exceptions, Mapping):
            raise ValidationError("exceptions must be an object", field=f"{field}.exceptions", code="malformed")
        exceptions = {
            str(app): LocationPolicy.from_json(p, field=f"{field}.exceptions.{app}")
            for app, p in raw_exceptions.items()
        }
        return cls(global_default=global_default, exceptions=exceptions)


@dataclass(frozen=True)
class ReportedLocation:
    """What an app receives; lat and lon are both set or both null."""

    lat: float | None
    lon: float | None
    timestamp: float

    def __post_init__(self):
        if (self.lat is None) != (self.lon is None):
            raise ValidationError("lat and lon must be null together", field="reported", code="malformed")

    def to_json(self) -> dict:
        return {"lat": self.lat, "lon": self.lon, "timestamp": self.timestamp}


@dataclass(frozen=True)
class Place:
    name: str
    lat: float
    lon: float
    kind: PlaceKind

    def to_json(self) -> dict:
        return {"name": self.name, "lat": self.lat, "lon": self.lon, "kind": self.kind.value}


# --- Policy resolution and dispatch ------------------------------------------


def resolve_policy(settings: LocationSettings, app_id: str) -> LocationPolicy:
    """Exception wins; unknown apps fall back to the global default."""
    return settings.exceptions.get(app_id, settings.global_default)


def apply_policy(fix: GeoFix, policy: LocationPolicy) -> ReportedLocation:
    """Transform the true fix per policy.

    Callers must obtain the true fix before dispatching, whatever the
    policy; the uniform signature here makes all four paths cost one
    position read, which is what closes the timing side channel between
    "app is blurred" and "app is trusted".
    """
    if policy.mode is PolicyMode.OFF:
        return ReportedLocation(lat=None, lon=None, timestamp=fix.timestamp)
    if policy.mode is PolicyMode.PRECISE:
        return ReportedLocation(lat=fix.lat, lon=fix.lon, timestamp=fix.timestamp)
    if policy.mode is PolicyMode.FIXED:
        return ReportedLocation(lat=policy.lat, lon=policy.lon, timestamp=fix.timestamp)
    return quantize(fix, policy.grid_km)  # BLUR


def grid_geometry(lat: float, lon: float, grid_km: float) -> tuple[int, int, float, float, float]:
    """Locate the cell containing (lat, lon): (row, col, dphi, dlam, center_lat).

    Internal helper shared by quantize and cell_bounds so both agree
    bit-for-bit on indexing.
    """
    dphi = (grid_km / EARTH_RADIUS_KM) * (180.0 / math.pi)
    n_rows = math.ceil(180.0 / dphi)
    row = min(int((lat + 90.0) // dphi), n_rows - 1)
    row_lo = -90.0 + row * dphi
    row_hi = min(row_lo + dphi, 90.0)
    center_lat = min(-90.0 + (row + 0.5) * dphi, 90.0)
    # Column width against the row's widest parallel, so cells never
    # exceed grid_km east-west anywhere inside the row.
    if row_lo <= 0.0 <= row_hi:
        cos_widest = 1.0
    else:
        cos_widest = math.cos(math.radians(min(abs(row_lo), abs(row_hi))))
    dlam = dphi / max(cos_widest, COS_FLOOR)
    n_cols = math.ceil(360.0 / dlam)
    col = min(int((lon + 180.0) // dlam), n_cols - 1)
    return row, col, dphi, dlam, center_lat


def quantize(fix: GeoFix, grid_km: float) -> ReportedLocation:
    """Deterministic cell-center quantization of a fix onto a grid_km grid."""
    if not MIN_GRID_KM <= grid_km <= MAX_GRID_KM:
        raise ValidationError(
            f"grid_km {grid_km!r} outside [{MIN_GRID_KM:g}, {MAX_GRID_KM:g}]",
            field="grid_km", code="out_of_range",
        )
    _, col, _, dlam, center_lat = grid_geometry(fix.lat, fix.lon, float(grid_km))
    center_lon = -180.0 + (col + 0.5) * dlam
    if center_lon >= 180.0:  # partial last column wraps across the antimeridian
        center_lon -= 360.0
    return ReportedLocation(lat=center_lat, lon=center_lon, timestamp=fix.timestamp)


def cell_bounds(lat: float, lon: float, grid_km: float) -> tuple[float, float, float, float]:
    """(lat_lo, lat_hi, lon_lo, lon_hi) of the cell containing the point."""
    row, col, dphi, dlam, _ = grid_geometry(lat, lon, float(grid_km))
    lat_lo = -90.0 + row * dphi
    lon_lo = -180.0 + col * dlam
    return lat_lo, min(lat_lo + dphi, 90.0), lon_lo, min(lon_lo + dlam, 180.0)


def haversine_km(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance on the mean-radius sphere."""
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp = p2 - p1
    dl = math.radians(lon2 - lon1)
    a = math.sin(dp / 2.0) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(a)))


# --- Gazetteer ----------------------------------------------------------------


def search_places(gazetteer: Iterable[Place], query: str) -> list[Place]:
    """Case-insensitive substring search, ordered by (match position, name).

    An empty query matches everything at position 0, i.e. returns the
    whole gazetteer sorted by name.
    """
    needle = query.casefold()
    hits: list[tuple[int, str, Place]] = []
    for place in gazetteer:
        pos = place.name.casefold().find(needle)
        if pos >= 0:
            hits.append((pos, place.name, place))
    hits.sort(key=lambda h: (h[0], h[1]))
    return [place for _, _, place in hits]


def load_gazetteer(path: str | None = None) -> list[Place]:
    """Load the bundled gazetteer (or a user-provided JSON file)."""
    if path is None:
        text = resources.files("privdash.data").joinpath("gazetteer.json").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"gazetteer is not valid JSON: {exc.msg} at offset {exc.pos}", field="$", code="malformed") from exc
    places = []
    for i, entry in enumerate(raw):
        try:
            kind = PlaceKind(entry.get("kind", "Custom"))
        except ValueError:
            raise ValidationError(f"unknown place kind {entry.get('kind')!r}", field=f"[{i}].kind", code="unknown_kind") from None
        places.append(Place(name=str(entry["name"]), lat=float(entry["lat"]), lon=float(entry["lon"]), kind=kind))
    return places


def unknown_exception_ids(settings: LocationSettings, apps: Iterable[AppRecord]) -> list[str]:
    """Exception entries that reference no installed app (kept, but flagged)."""
    known = {app.app_id for app in apps}
    return sorted(app_id for app_id in settings.exceptions if app_id not in known)
