"""Device substrate: config loading, position, SMS transport, effects."""

import json

import pytest
from hypothesis import given, strategies as st

from privdash.device import (
    AppRecord,
    DeviceState,
    GeoFix,
    LockDevice,
    LockState,
    SendSms,
    SmsMessage,
    StartRinger,
    StoreKind,
    WipeData,
    apply_effect,
    load_device,
    parse_track,
    receive_sms,
    set_position,
)
from privdash.errors import ValidationError


def make_config(**overrides):
    config = {
        "apps": [
            {"app_id": "settings", "display_name": "Settings", "system_flag": True},
            {"app_id": "camera", "display_name": "Camera"},
            {"app_id": "maps", "display_name": "Maps"},
        ],
        "stores": {},
        "resources": {},
    }
    config.update(overrides)
    return config


class TestLoadDevice:
    def test_three_apps_empty_stores(self):
        state = load_device(make_config())
        assert len(state.apps) == 3
        assert all(state.stores[kind] == () for kind in StoreKind)
        assert state.lock is LockState.UNLOCKED
        assert state.inbound_sms == () and state.outbound_sms == ()

    def test_system_flag_parsed(self):
        state = load_device(make_config())
        settings_app = state.app_by_id("settings")
        assert settings_app is not None and settings_app.system_flag
        assert not state.app_by_id("camera").system_flag

    def test_duplicate_app_id_rejected_naming_duplicate(self):
        config = make_config(apps=[{"app_id": "x"}, {"app_id": "x"}])
        with pytest.raises(ValidationError, match="'x'"):
            load_device(config)

    def test_malformed_json_rejected_with_location(self):
        with pytest.raises(ValidationError, match=r"line \d+"):
            load_device('{"apps": [,]}')

    def test_unknown_store_kind_rejected(self):
        with pytest.raises(ValidationError, match="Diary"):
            load_device(make_config(stores={"Diary": []}))

    def test_store_records_loaded(self):
        config = make_config(stores={"Contacts": [{"name": "Alice"}]})
        state = load_device(config)
        assert state.stores[StoreKind.CONTACTS] == ({"name": "Alice"},)

    def test_exactly_six_store_kinds(self):
        assert {k.value for k in StoreKind} == {
            "Contacts", "CallHistory", "SmsHistory", "Emails", "Photos", "BrowserHistory",
        }

    def test_accepts_json_text(self):
        state = load_device(json.dumps(make_config()))
        assert len(state.apps) == 3


class TestGeoFix:
    def test_in_range(self):
        fix = GeoFix(lat=52.5200, lon=13.4050, timestamp=1.0)
        assert (fix.lat, fix.lon) == (52.52, 13.405)

    def test_lon_180_normalizes_to_minus_180(self):
        assert GeoFix(lat=0.0, lon=180.0, timestamp=0.0).lon == -180.0

    def test_lat_91_rejected(self):
        with pytest.raises(ValidationError):
            GeoFix(lat=91.0, lon=0.0, timestamp=0.0)

    def test_lon_beyond_181_rejected(self):
        with pytest.raises(ValidationError):
            GeoFix(lat=0.0, lon=181.0, timestamp=0.0)


class TestSetPosition:
    def test_replaces_position_and_advances_clock(self):
        state = load_device(make_config())
        state = set_position(state, GeoFix(lat=1.0, lon=2.0, timestamp=100.0))
        assert state.position.lat == 1.0
        assert state.clock == 100.0

    def test_clock_never_decreases(self):
        state = load_device(make_config())
        state = set_position(state, GeoFix(lat=1.0, lon=2.0, timestamp=100.0))
        state = set_position(state, GeoFix(lat=3.0, lon=4.0, timestamp=50.0))
        assert state.position.lat == 3.0  # position replaced
        assert state.clock == 100.0       # clock clamped

    @given(st.lists(st.floats(min_value=0, max_value=1e9, allow_nan=False), min_size=1, max_size=30))
    def test_clock_monotone_over_any_fix_sequence(self, timestamps):
        state = load_device(make_config())
        last = state.clock
        for ts in timestamps:
            state = set_position(state, GeoFix(lat=0.0, lon=0.0, timestamp=ts))
            assert state.clock >= last
            last = state.clock


class TestSmsTransport:
    def test_receive_appends_exactly_one(self):
        state = load_device(make_config())
        msg = SmsMessage(sender="+491701234567", body="hello", received_at=5.0)
        state2 = receive_sms(state, msg)
        assert len(state2.inbound_sms) == len(state.inbound_sms) + 1
        assert state2.inbound_sms[-1] == msg

    def test_body_ceiling_1600(self):
        SmsMessage(sender="x", body="a" * 1600, received_at=0.0)
        with pytest.raises(ValidationError):
            SmsMessage(sender="x", body="a" * 1601, received_at=0.0)

    @given(st.lists(st.text(max_size=40), max_size=20))
    def test_conservation_over_any_message_sequence(self, bodies):
        state = load_device(make_config())
        for i, body in enumerate(bodies):
            state = receive_sms(state, SmsMessage(sender="s", body=body, received_at=float(i)))
        assert [m.body for m in state.inbound_sms] == bodies


class TestEffects:
    def test_lock(self):
        state = apply_effect(load_device(make_config()), LockDevice())
        assert state.lock is LockState.LOCKED

    def test_ringer(self):
        state = apply_effect(load_device(make_config()), StartRinger(volume=100))
        assert state.ringer.ringing and state.ringer.volume == 100

    def test_send_sms_appends_outbound(self):
        state = load_device(make_config())
        state = apply_effect(state, SendSms(to="+49170", body="report"))
        state = apply_effect(state, SendSms(to="+49171", body="report2"))
        assert [m.to for m in state.outbound_sms] == ["+49170", "+49171"]

    def test_wipe_empties_all_stores_and_marks_wiped(self):
        config = make_config(stores={"Contacts": [{"name": "A"}], "Photos": [{"f": 1}]})
        state = apply_effect(load_device(config), WipeData())
        assert state.lock is LockState.WIPED
        assert all(state.stores[kind] == () for kind in StoreKind)

    def test_lock_after_wipe_stays_wiped(self):
        state = apply_effect(load_device(make_config()), WipeData())
        assert apply_effect(state, LockDevice()).lock is LockState.WIPED


class TestTrackReplay:
    def test_parses_lines_and_skips_comments(self):
        fixes = parse_track("# walk\n100 52.52 13.405\n\n160 52.53 13.41\n")
        assert [f.timestamp for f in fixes] == [100.0, 160.0]
        assert fixes[0].lat == 52.52

    def test_bad_line_reports_line_number(self):
        with pytest.raises(ValidationError, match="line 2"):
            parse_track("100 52.52 13.405\n200 oops 13\n")

    def test_wrong_field_count_reports_line(self):
        with pytest.raises(ValidationError, match="line 1"):
            parse_track("1 2\n")
