"""privdash: privacy policy enforcement over a simulated mobile device.

Core pieces:

- ``device``   - the simulated phone and its declarative effects
- ``geopriv``  - per-app location policies and grid quantization
- ``rpp``      - SMS remote-protection grammar and state machine
- ``guest``    - secondary-user profiles and data substitution
- ``backup``   - archives, checksums and destinations
- ``engine``   - the single-writer command stream tying it together
- ``service``  - persistence, guided tour, HTTP API and CLI
"""

from .device import (
    AppRecord,
    DeviceState,
    GeoFix,
    LockState,
    Principal,
    ResourceKind,
    SmsMessage,
    StoreKind,
    load_device,
    parse_track,
)
from .engine import PrivacyEngine
from .geopriv import (
    LocationPolicy,
    LocationSettings,
    Place,
    PolicyMode,
    ReportedLocation,
    apply_policy,
    haversine_km,
    load_gazetteer,
    quantize,
    resolve_policy,
    search_places,
)
from .guest import GuestProfile, VisibleState
from .rpp import RppPhase, RppVerb, parse_command

__all__ = [
    "AppRecord",
    "DeviceState",
    "GeoFix",
    "GuestProfile",
    "LocationPolicy",
    "LocationSettings",
    "LockState",
    "Place",
    "PolicyMode",
    "PrivacyEngine",
    "Principal",
    "ReportedLocation",
    "ResourceKind",
    "RppPhase",
    "RppVerb",
    "SmsMessage",
    "StoreKind",
    "VisibleState",
    "apply_policy",
    "haversine_km",
    "load_device",
    "load_gazetteer",
    "parse_command",
    "parse_track",
    "quantize",
    "resolve_policy",
    "search_places",
]

__version__ = "0.1.0"
