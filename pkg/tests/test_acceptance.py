"""Acceptance gate: one test per criterion, each printing PASS/FAIL and runtime.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
lines. Every tolerance and budget is pinned here, not calibrated later.
"""

import json
import math
import random
import time
from contextlib import contextmanager

import pytest
from fastapi.testclient import TestClient

from privdash.backup import archive_to_bytes, build_archive, parse_archive
from privdash.device import (
    GeoFix,
    LockDevice,
    SendSms,
    SmsMessage,
    StartRinger,
    StoreKind,
    WipeData,
    load_device,
    replace_store,
)
from privdash.engine import PrivacyEngine
from privdash.errors import IntegrityError, ValidationError
from privdash.events import EventKind
from privdash.geopriv import (
    LocationPolicy,
    LocationSettings,
    apply_policy,
    cell_bounds,
    haversine_km,
    quantize,
)
from privdash.guest import GuestProfile
from privdash.rpp import (
    DEFAULT_ENABLED,
    RppCommand,
    RppConfig,
    RppPhase,
    RppState,
    RppVerb,
    fold_token,
    handle_inbound,
    parse_command,
    set_passphrase,
)
from privdash.service.app import create_app

from oracles import reference_accepts


@contextmanager
def criterion(name: str, budget_seconds: float | None = None):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"[ACCEPTANCE] {name}: FAIL ({time.perf_counter() - start:.2f}s)", flush=True)
        raise
    elapsed = time.perf_counter() - start
    print(f"[ACCEPTANCE] {name}: PASS ({elapsed:.2f}s)", flush=True)
    if budget_seconds is not None:
        assert elapsed < budget_seconds, f"{name} exceeded budget of {budget_seconds}s: {elapsed:.2f}s"


# --- 1. Grammar oracle equivalence -----------------------------------------------

TOKEN_ALPHABET = "abcdefghijklmnopqrstuvwxyz0123456789"
EXOTIC_VALID = "KKİıſABCXYZ"  # fold into [a-z0-9] under /i
SEPARATORS = [" ", "  ", "\t", "\n", " \t ", " ", "\r\n", "\v"]
BAD_CHARS = "-_!. ,;:ß éé #@"


def _valid_command(rng: random.Random) -> str:
    keyword = rng.choice(["rpp", "RPP", "Rpp", "rPp", "rpP"])
    verb = rng.choice(["lock", "ring", "locate", "wipe"])
    verb = "".join(c.upper() if rng.random() < 0.3 else c for c in verb)
    length = rng.choice([1, 2, 3, 8, 20, 99, 100])
    token = "".join(rng.choice(TOKEN_ALPHABET) for _ in range(length))
    if rng.random() < 0.15:
        pos = rng.randrange(len(token))
        token = token[:pos] + rng.choice(EXOTIC_VALID) + token[pos + 1:]
    return f"{keyword}{rng.choice(SEPARATORS)}{verb}{rng.choice(SEPARATORS)}{token}"


def _near_miss(rng: random.Random) -> str:
    base = _valid_command(rng)
    mutation = rng.randrange(10)
    if mutation == 0:
        return base + rng.choice([" ", "\t", ".", "!", " extra"])
    if mutation == 1:
        return rng.choice([" ", "\n"]) + base
    if mutation == 2:
        pos = rng.randrange(len(base))
        return base[:pos] + rng.choice(BAD_CHARS) + base[pos:]
    if mutation == 3:
        return base.replace(" ", "", 1) if " " in base else base + "x"
    if mutation == 4:
        return f"rpp {rng.choice(['lockk', 'rng', 'located', 'wip', 'unlock', 'find'])} abc123"
    if mutation == 5:
        return f"rpp lock {'a' * rng.choice([101, 150, 200])}"
    if mutation == 6:
        return rng.choice(["rpp", "rpp ", "rpp lock", "rpp  lock ", ""])
    if mutation == 7:
        return rng.choice(["rppx lock abc", "xrpp lock abc", "rp p lock abc", "rpp- lock abc"])
    if mutation == 8:
        return f"rpp lock {rng.choice(['pass-word', 'pass word', 'päss', 'a b', 'ß', 'é'])}"
    return base + "\x00"


def _random_text(rng: random.Random) -> str:
    alphabet = rng.choice([
        "abcdefghijklmnopqrstuvwxyz ",
        "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 \t",
        "rpp locking wiped üäß€世界 ",
        "!@#$%^&*()[]{}<>~ \n",
    ])
    return "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 60)))


def test_criterion_grammar_oracle_equivalence():
    with criterion("grammar oracle equivalence (10,000 strings, 100% agreement)", 5.0):
        rng = random.Random(0xC0FFEE)
        corpus = (
            [_valid_command(rng) for _ in range(3500)]
            + [_near_miss(rng) for _ in range(3500)]
            + [_random_text(rng) for _ in range(3000)]
        )
        assert len(corpus) == 10_000
        disagreements = []
        for body in corpus:
            mine = parse_command(body)
            theirs = reference_accepts(body)
            if isinstance(mine, RppCommand) != (theirs is not None):
                disagreements.append(body)
            elif theirs is not None:
                if mine.verb.value != fold_token(theirs.group(1)) or mine.passphrase_token != fold_token(theirs.group(2)):
                    disagreements.append(body)
        assert disagreements == [], f"{len(disagreements)} disagreements, first: {disagreements[:3]!r}"


# --- 2. Displacement bound ---------------------------------------------------------

GRID_SIZES = (1.0, 10.0, 100.0, 500.0)


def _random_fix(rng: random.Random) -> tuple[float, float]:
    return rng.uniform(-85.0, 85.0), rng.uniform(-180.0, 180.0)


def test_criterion_displacement_bound():
    with criterion("displacement bound (4 x 10,000 fixes, <= 0.7071*X*1.05)", 10.0):
        rng = random.Random(0xD157)
        for grid_km in GRID_SIZES:
            bound = grid_km * math.sqrt(2.0) / 2.0 * 1.05
            for _ in range(10_000):
                lat, lon = _random_fix(rng)
                reported = quantize(GeoFix(lat=lat, lon=lon, timestamp=0.0), grid_km)
                displacement = haversine_km(lat, lon, reported.lat, reported.lon)
                assert displacement <= bound, (
                    f"X={grid_km}: fix ({lat}, {lon}) displaced {displacement:.3f} km > {bound:.3f} km"
                )


# --- 3. Cell stability ----------------------------------------------------------------

def test_criterion_cell_stability():
    with criterion("cell stability (1,000 cells per X, bit-identical centers)", 10.0):
        rng = random.Random(0x5EED)
        for grid_km in GRID_SIZES:
            for _ in range(1_000):
                lat, lon = _random_fix(rng)
                expected = quantize(GeoFix(lat=lat, lon=lon, timestamp=0.0), grid_km)
                lat_lo, lat_hi, lon_lo, lon_hi = cell_bounds(lat, lon, grid_km)
                lat_margin = (lat_hi - lat_lo) * 1e-6
                lon_margin = (lon_hi - lon_lo) * 1e-6
                for _ in range(5):
                    sample_lat = rng.uniform(lat_lo + lat_margin, lat_hi - lat_margin)
                    sample_lon = rng.uniform(lon_lo + lon_margin, min(lon_hi - lon_margin, 180.0 - 1e-12))
                    sampled = quantize(GeoFix(lat=sample_lat, lon=sample_lon, timestamp=1.0), grid_km)
                    assert (sampled.lat, sampled.lon) == (expected.lat, expected.lon), (
                        f"X={grid_km}: ({sample_lat}, {sample_lon}) in cell of ({lat}, {lon}) "
                        f"mapped to {(sampled.lat, sampled.lon)} != {(expected.lat, expected.lon)}"
                    )


# --- 4. Policy dispatch truth table ------------------------------------------------------

def test_criterion_policy_dispatch_truth_table():
    with criterion("policy dispatch truth table (Off/Precise/Fixed/Blur)"):
        rng = random.Random(0xD05E)
        fixed = LocationPolicy.fixed(48.8566, 2.3522)
        for i in range(100):
            lat, lon = _random_fix(rng)
            fix = GeoFix(lat=lat, lon=lon, timestamp=float(i))

            off = apply_policy(fix, LocationPolicy.off())
            assert off.lat is None and off.lon is None

            precise = apply_policy(fix, LocationPolicy.precise())
            assert (precise.lat, precise.lon) == (fix.lat, fix.lon)

            pinned = apply_policy(fix, fixed)
            assert (pinned.lat, pinned.lon) == (48.8566, 2.3522)

            blurred = apply_policy(fix, LocationPolicy.blur(10.0))
            assert blurred == quantize(fix, 10.0)
            assert blurred.lat is not None and blurred.lon is not None


# --- 5. RPP state machine exhaustive walk ---------------------------------------------------

# Hand-built transition table: (phase, verb, auth_ok, enabled) ->
# (effect kinds, next phase, failed counter after one message from fresh state).
# Armed and AwaitingNewPassphrase behave identically for remote commands:
# the old passphrase keeps authenticating until the rotation completes.
_ACTIVE_EXPECTATIONS = {}
for _phase in (RppPhase.ARMED, RppPhase.AWAITING_NEW_PASSPHRASE):
    _ACTIVE_EXPECTATIONS.update({
        (_phase, RppVerb.LOCK, True, True): ((LockDevice,), _phase, 0),
        (_phase, RppVerb.RING, True, True): ((LockDevice, StartRinger), _phase, 0),
        (_phase, RppVerb.LOCATE, True, True): ((SendSms, LockDevice), _phase, 0),
        (_phase, RppVerb.WIPE, True, True): ((WipeData,), RppPhase.WIPED, 0),
        (_phase, RppVerb.LOCK, True, False): ((), _phase, 0),
        (_phase, RppVerb.RING, True, False): ((), _phase, 0),
        (_phase, RppVerb.LOCATE, True, False): ((), _phase, 0),
        (_phase, RppVerb.WIPE, True, False): ((), _phase, 0),
        (_phase, RppVerb.LOCK, False, True): ((), _phase, 1),
        (_phase, RppVerb.RING, False, True): ((), _phase, 1),
        (_phase, RppVerb.LOCATE, False, True): ((), _phase, 1),
        (_phase, RppVerb.WIPE, False, True): ((), _phase, 1),
        (_phase, RppVerb.LOCK, False, False): ((), _phase, 1),
        (_phase, RppVerb.RING, False, False): ((), _phase, 1),
        (_phase, RppVerb.LOCATE, False, False): ((), _phase, 1),
        (_phase, RppVerb.WIPE, False, False): ((), _phase, 1),
    })
# Disarmed (no passphrase set) and Wiped: every message is inert.
_INERT_EXPECTATIONS = {
    (phase, verb, auth_ok, enabled): ((), phase, 0)
    for phase in (RppPhase.DISARMED, RppPhase.WIPED)
    for verb in RppVerb
    for auth_ok in (True, False)
    for enabled in (True, False)
}
TRANSITION_TABLE = {**_ACTIVE_EXPECTATIONS, **_INERT_EXPECTATIONS}

FIX = GeoFix(lat=52.52, lon=13.405, timestamp=1000.0)


def _fresh(phase: RppPhase, verb: RppVerb, enabled: bool) -> tuple[RppState, RppConfig | None]:
    if phase is RppPhase.DISARMED:
        return RppState(phase=phase), None
    config = set_passphrase(None, "s3cret")
    commands = frozenset({verb}) if enabled else frozenset(set(RppVerb) - {verb})
    config = RppConfig(
        passphrase=config.passphrase,
        previous_passphrase=config.previous_passphrase,
        enabled_commands=commands,
    )
    return RppState(phase=phase), config


def test_criterion_rpp_state_machine():
    with criterion("RPP state machine exhaustive walk (64 combos + invariants)", 1.0):
        assert len(TRANSITION_TABLE) == 4 * 4 * 2 * 2
        for (phase, verb, auth_ok, enabled), (kinds, next_phase, failures) in TRANSITION_TABLE.items():
            state, config = _fresh(phase, verb, enabled)
            token = "s3cret" if auth_ok else "wrongpass"
            msg = SmsMessage(sender="+1", body=f"rpp {verb.value} {token}", received_at=1000.0)
            state2, effects = handle_inbound(state, config, msg, FIX, now=1000.0)
            combo = f"(phase={phase.value}, verb={verb.value}, auth={auth_ok}, enabled={enabled})"
            assert tuple(type(e) for e in effects) == kinds, combo
            assert state2.phase is next_phase, combo
            assert state2.failed_attempts == failures, combo
            if not auth_ok:  # wrong passphrase must change nothing but the counter
                assert effects == [], combo

        # wipe terminality: after a wipe, every input is inert
        state, config = _fresh(RppPhase.ARMED, RppVerb.WIPE, True)
        state, effects = handle_inbound(state, config, SmsMessage(sender="+1", body="rpp wipe s3cret", received_at=0.0), FIX, now=0.0)
        assert [type(e) for e in effects] == [WipeData]
        for verb in RppVerb:
            for token in ("s3cret", "wrong"):
                msg = SmsMessage(sender="+1", body=f"rpp {verb.value} {token}", received_at=1.0)
                state2, effects = handle_inbound(state, config, msg, FIX, now=1.0)
                assert effects == [] and state2 == state

        # locate re-entrancy: N locates produce exactly N position reports
        state, config = _fresh(RppPhase.ARMED, RppVerb.LOCATE, True)
        reports = 0
        for i in range(7):
            msg = SmsMessage(sender="+1", body="rpp locate s3cret", received_at=float(i))
            state, effects = handle_inbound(state, config, msg, FIX, now=float(i))
            reports += sum(isinstance(e, SendSms) for e in effects)
        assert reports == 7

        # rotation: set("a1") -> rotate("a1") rejected; rotate("b2") accepted
        config = set_passphrase(None, "a1")
        with pytest.raises(ValidationError):
            set_passphrase(config, "a1")
        rotated = set_passphrase(config, "b2")
        assert rotated.passphrase.matches("b2") and rotated.previous_passphrase.matches("a1")

        # grammar round-trip: accepted strings re-serialize to accepted strings
        for verb in RppVerb:
            for token in ("a", "x9" * 50):
                parsed = parse_command(f"rpp {verb.value} {token}")
                assert isinstance(parsed, RppCommand)
                assert parse_command(f"rpp {parsed.verb.value} {parsed.passphrase_token}") == parsed


# --- 6. Guest round-trip ---------------------------------------------------------------------

GUEST_APPS = [
    {"app_id": "settings", "display_name": "Settings", "system_flag": True},
    {"app_id": "dashboard", "display_name": "Privacy Dashboard", "system_flag": True},
    {"app_id": "camera", "display_name": "Camera"},
    {"app_id": "maps", "display_name": "Maps"},
    {"app_id": "chat", "display_name": "Chat"},
    {"app_id": "browser", "display_name": "Browser"},
]


def _random_record(rng: random.Random) -> dict:
    return {
        "name": "".join(rng.choice("abcdefghijklmnopqrstuvwxyzäöü世") for _ in range(rng.randrange(1, 10))),
        "value": rng.randrange(0, 10_000),
        "tags": [rng.choice(["a", "b", "c"]) for _ in range(rng.randrange(0, 3))],
    }


def test_criterion_guest_round_trip():
    with criterion("guest round-trip (500 randomized store/profile/mutation triples)", 30.0):
        rng = random.Random(0x6E57)
        for trial in range(500):
            stores = {
                kind.value: [_random_record(rng) for _ in range(rng.randrange(0, 5))]
                for kind in StoreKind if rng.random() < 0.8
            }
            engine = PrivacyEngine(load_device({"apps": GUEST_APPS, "stores": stores}))
            engine.set_owner_pin("pin")
            protected = frozenset(k for k in StoreKind if rng.random() < 0.5)
            visible = frozenset(
                a["app_id"] for a in GUEST_APPS if rng.random() < 0.5
            )  # may include system apps: must be stripped
            profile, _ = engine.create_profile(GuestProfile(
                profile_id="p", name="p", visible_apps=visible, protected_stores=protected,
            ))
            before = {kind: engine.device.stores[kind] for kind in StoreKind}

            engine.enter_guest("p", "pin")
            # system-flagged apps absent from every guest view and search
            view = engine.effective_view()
            assert all(not a.system_flag for a in view.apps), trial
            assert engine.search_apps("settings") == ()
            assert engine.search_apps("dash") == ()
            for kind in protected:
                assert engine.query_store(kind) == (), trial

            mutations = [(rng.choice(sorted(StoreKind, key=lambda k: k.value)), _random_record(rng))
                         for _ in range(rng.randrange(0, 6))]
            for kind, record in mutations:
                engine.add_record(kind, record)

            engine.exit_guest("pin")
            after = {kind: engine.device.stores[kind] for kind in StoreKind}
            for kind in StoreKind:
                if kind in protected:
                    assert after[kind] == before[kind], f"trial {trial}: {kind} not restored bit-exact"
                else:
                    added = tuple(r for k, r in mutations if k == kind)
                    assert after[kind] == before[kind] + added, trial


# --- 7. Backup round-trip and tamper detection --------------------------------------------------

def test_criterion_backup_round_trip_and_tamper():
    with criterion("backup round-trip + tamper detection (100 randomized states)", 30.0):
        rng = random.Random(0xBAC4)
        for trial in range(100):
            stores = {
                kind.value: [_random_record(rng) for _ in range(rng.randrange(0, 6))]
                for kind in StoreKind
            }
            engine = PrivacyEngine(load_device({"apps": GUEST_APPS, "stores": stores}))
            engine.set_owner_pin("pin")
            before = {kind: engine.device.stores[kind] for kind in StoreKind}

            archive, key = engine.create_backup(set(StoreKind), "default")
            data = engine.fetch_backup("default", key)

            for kind in StoreKind:
                engine.device = replace_store(engine.device, kind, ())
            engine.restore_backup(data, "pin")
            assert {kind: engine.device.stores[kind] for kind in StoreKind} == before, trial

            payload_start = data.index(b'"payload"') + len(b'"payload":')
            for _ in range(3):
                position = rng.randrange(payload_start, len(data) - 1)
                tampered = bytearray(data)
                tampered[position] ^= 1 << rng.randrange(8)
                if bytes(tampered) == data:
                    continue
                with pytest.raises(IntegrityError):
                    parse_archive(bytes(tampered))


# --- 8. API/engine contract -----------------------------------------------------------------------

API_DEVICE = {
    "apps": GUEST_APPS,
    "stores": {"Contacts": [{"name": "A", "phone": "1"}], "Photos": [{"file": "x.jpg"}]},
    "position": {"lat": 52.52, "lon": 13.405, "timestamp": 1000.0},
}

EFFECT_EVENT_KINDS = {
    EventKind.SMS_OUT, EventKind.LOCKED, EventKind.RINGING,
    EventKind.WIPED, EventKind.LOCATION_QUERIED,
}


def test_criterion_api_engine_contract(tmp_path):
    with criterion("API/engine contract (every endpoint vs direct call; 1 event per effect)"):
        via_api = PrivacyEngine(load_device(API_DEVICE))
        direct = PrivacyEngine(load_device(API_DEVICE))
        app = create_app(via_api, settings_path=str(tmp_path / "state.json"))
        effect_count = 0

        with TestClient(app) as client:
            # settings: location
            payload = {
                "global_default": {"mode": "blur", "grid_km": 30},
                "exceptions": {"chat": {"mode": "off"}, "maps": {"mode": "precise"}},
            }
            api_warnings = client.put("/api/settings/location", json=payload).json()["warnings"]
            direct_warnings = direct.set_location_settings(LocationSettings.from_json(payload))
            assert api_warnings == direct_warnings
            assert client.get("/api/settings/location").json() == direct.location.to_json()

            # settings: rpp enabled + passphrase
            client.put("/api/settings/rpp", json={"enabled_commands": ["lock", "ring", "locate", "wipe"]})
            direct.set_rpp_enabled(set(RppVerb))
            client.post("/api/rpp/passphrase", json={"passphrase": "s3cret"})
            direct.set_passphrase("s3cret")
            assert client.get("/api/settings/rpp").json() == direct.rpp_status()

            # owner pin
            client.post("/api/settings/owner-pin", json={"pin": "9876"})
            direct.set_owner_pin("9876")

            # device: position
            client.put("/api/device/position", json={"lat": 48.85, "lon": 2.35, "timestamp": 1100.0})
            direct.set_position(GeoFix(lat=48.85, lon=2.35, timestamp=1100.0))
            assert client.get("/api/device/status").json()["position"] == {
                "lat": direct.device.position.lat,
                "lon": direct.device.position.lon,
                "timestamp": direct.device.position.timestamp,
            }

            # location queries for every policy shape
            for app_id in ("chat", "maps", "camera", "nonexistent"):
                api_reported = client.get("/api/location/query", params={"app": app_id}).json()
                direct_reported = direct.query_location(app_id)
                effect_count += 1  # one PositionReport per query
                assert api_reported == direct_reported.to_json(), app_id

            # sms: ordinary + remote command
            for body in ("hello there", "rpp ring s3cret"):
                api_effects = client.post("/api/device/sms", json={"from": "+49", "body": body}).json()["effects"]
                direct_effects = direct.deliver_sms(
                    SmsMessage(sender="+49", body=body, received_at=direct.now)
                )
                effect_count += len(direct_effects)
                assert api_effects == [type(e).__name__ for e in direct_effects]
            assert client.get("/api/device/status").json()["lock"] == direct.device.lock.value
            assert client.get("/api/device/status").json()["ringer"] == {
                "volume": direct.device.ringer.volume, "ringing": direct.device.ringer.ringing,
            }

            # unlock
            api_unlock = client.post("/api/device/unlock", json={"passphrase": "s3cret"}).json()
            direct_unlocked = direct.local_unlock("s3cret")
            assert api_unlock["unlocked"] == direct_unlocked
            assert api_unlock["rpp"] == direct.rpp_status()
            client.post("/api/rpp/passphrase", json={"passphrase": "fresh1"})
            direct.set_passphrase("fresh1")

            # guest: profile, enter, view, exit
            profile_payload = {
                "profile_id": "kids", "name": "Kids",
                "visible_apps": ["camera", "settings"],
                "protected_stores": ["Contacts"],
                "resource_overrides": {"WiFi": False},
            }
            api_profile = client.post("/api/guest/profiles", json=profile_payload).json()
            direct_profile, direct_prof_warnings = direct.create_profile(
                GuestProfile.from_json(profile_payload)
            )
            assert api_profile["profile"] == direct_profile.to_json()
            assert api_profile["warnings"] == direct_prof_warnings
            assert client.get("/api/guest/profiles").json()["profiles"] == [
                p.to_json() for p in direct.profiles.values()
            ]

            def view_json(engine):
                view = engine.effective_view()
                return {
                    "apps": [
                        {"app_id": a.app_id, "display_name": a.display_name, "system_flag": a.system_flag}
                        for a in view.apps
                    ],
                    "stores": {k.value: list(v) for k, v in sorted(view.stores.items(), key=lambda kv: kv[0].value)},
                    "resources": {k.value: v for k, v in sorted(view.resources.items(), key=lambda kv: kv[0].value)},
                    "session_active": view.session_active,
                    "profile_id": view.profile_id,
                }

            api_view = client.post("/api/guest/enter", json={"profile_id": "kids", "auth": "fresh1"}).json()
            direct.enter_guest("kids", "fresh1")
            assert api_view == view_json(direct)
            assert client.get("/api/guest/view").json() == view_json(direct)
            api_view = client.post("/api/guest/exit", json={"auth": "fresh1"}).json()
            direct.exit_guest("fresh1")
            assert api_view == view_json(direct)

            # backup + restore
            api_backup = client.post("/api/backup", json={"stores": ["Contacts", "Photos"]}).json()
            direct_archive, direct_key = direct.create_backup({StoreKind.CONTACTS, StoreKind.PHOTOS}, "default")
            assert api_backup["key"] == direct_key
            assert api_backup["checksum"] == direct_archive.checksum
            assert api_backup["manifest"] == direct_archive.manifest

            api_restored = client.post("/api/restore", json={
                "auth": "fresh1", "destination_id": "default", "key": api_backup["key"],
            }).json()["restored"]
            direct_restored = direct.restore_backup(direct.fetch_backup("default", direct_key), "fresh1")
            assert api_restored == sorted(k.value for k in direct_restored)

            # tour and export are pure views over the same state
            from privdash.service.settings import engine_settings, export_settings
            from privdash.service.tour import get_tour, load_tour
            assert client.get("/api/tour").json()["panels"] == [p.to_json() for p in get_tour(load_tour())]
            assert client.get("/api/settings/export").json() == export_settings(engine_settings(direct))

            # event feeds: identical records, and exactly one event per effect
            api_events = client.get("/api/events", params={"since": 0}).json()["events"]
            direct_events = [r.to_json() for r in direct.events.since(0)]
            assert api_events == direct_events
            effect_events = [e for e in api_events if EventKind(e["kind"]) in EFFECT_EVENT_KINDS]
            assert len(effect_events) == effect_count
