"""HTTP/JSON API over the engine, plus the simulated blob-store endpoints.

Every endpoint delegates 1:1 to an engine operation; the dashboard UI,
the CLI and the tests all drive this same surface. Mutations are
serialized through one lock (the engine is single-writer); reads serve
snapshots. Error mapping: validation 400, auth 401, not-found 404,
conflict 409, unreachable destination 502 - always as
``{"error": {"code", "message", "field"?}}``.

No response ever contains a passphrase, a PIN, or their digests.
"""

from __future__ import annotations

import os
import threading
from typing import Any, Mapping

from fastapi import Body, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, RedirectResponse, Response
from fastapi.staticfiles import StaticFiles

from .. import backup as bk
from ..device import (
    GeoFix,
    Principal,
    SmsMessage,
    StoreKind,
    parse_store_kind,
)
from ..engine import PrivacyEngine
from ..errors import (
    AuthError,
    ConflictError,
    DestinationError,
    IntegrityError,
    NotFoundError,
    PrivdashError,
    ValidationError,
)
from ..geopriv import LocationSettings, Place, load_gazetteer, search_places
from ..guest import GuestProfile, VisibleState
from ..rpp import RppVerb, redact_body
from .settings import engine_settings, export_settings, import_settings, save_settings
from .tour import TourPanel, get_tour, load_tour

_STATUS = {
    ValidationError: 400,
    IntegrityError: 400,
    AuthError: 401,
    NotFoundError: 404,
    ConflictError: 409,
    DestinationError: 502,
}


def _error_payload(code: str, message: str, field: str | None = None) -> dict:
    error: dict = {"code": code, "message": message}
    if field:
        error["field"] = field
    return {"error": error}


def _require(payload: Mapping, key: str, kind: type, *, field: str | None = None) -> Any:
    value = payload.get(key)
    if not isinstance(value, kind) or (kind is str and not value):
        raise ValidationError(
            f"{key} must be a non-empty {kind.__name__}" if kind is str else f"{key} must be a {kind.__name__}",
            field=field or key, code="missing_field" if value is None else "malformed",
        )
    return value


def _view_json(view: VisibleState) -> dict:
    return {
        "apps": [
            {"app_id": a.app_id, "display_name": a.display_name, "system_flag": a.system_flag}
            for a in view.apps
        ],
        "stores": {kind.value: list(records) for kind, records in sorted(view.stores.items(), key=lambda kv: kv[0].value)},
        "resources": {kind.value: flag for kind, flag in sorted(view.resources.items(), key=lambda kv: kv[0].value)},
        "session_active": view.session_active,
        "profile_id": view.profile_id,
    }


def _status_json(engine: PrivacyEngine) -> dict:
    device = engine.device
    session = engine.session
    return {
        "lock": device.lock.value,
        "ringer": {"volume": device.ringer.volume, "ringing": device.ringer.ringing},
        "position": (
            {"lat": device.position.lat, "lon": device.position.lon, "timestamp": device.position.timestamp}
            if device.position else None
        ),
        "clock": device.clock,
        "resources": {kind.value: flag for kind, flag in sorted(device.resources.items(), key=lambda kv: kv[0].value)},
        "guest_session": (
            {"profile_id": session.profile_id, "entered_at": session.entered_at} if session else None
        ),
        "inbound_sms": [
            {"sender": m.sender, "body": redact_body(m.body), "received_at": m.received_at}
            for m in device.inbound_sms
        ],
        "outbound_sms": [
            {"to": m.to, "body": m.body, "sent_at": m.sent_at} for m in device.outbound_sms
        ],
        "rpp": engine.rpp_status(),
    }


def _parse_selection(raw: Any) -> set[StoreKind]:
    if raw == "all":
        return set(StoreKind)
    if not isinstance(raw, list) or not raw:
        raise ValidationError("stores must be a non-empty list of store kinds or 'all'", field="stores", code="malformed")
    return {parse_store_kind(str(name), field="stores") for name in raw}


def create_app(
    engine: PrivacyEngine,
    *,
    panels: list[TourPanel] | None = None,
    gazetteer: list[Place] | None = None,
    settings_path: str | None = None,
    ui_dir: str | None = None,
) -> FastAPI:
    panels = panels if panels is not None else load_tour()
    gazetteer = gazetteer if gazetteer is not None else load_gazetteer()
    app = FastAPI(title="privdash", docs_url=None, redoc_url=None)
    lock = threading.RLock()

    if settings_path:
        def _persist(_section: str) -> None:
            save_settings(settings_path, engine_settings(engine))
        engine.on_settings_changed = _persist

    @app.exception_handler(PrivdashError)
    async def _privdash_error(_req: Request, exc: PrivdashError):
        status = next((s for klass, s in _STATUS.items() if isinstance(exc, klass)), 500)
        field = getattr(exc, "field", None)
        return JSONResponse(status_code=status, content=_error_payload(exc.code, exc.message, field))

    @app.exception_handler(RequestValidationError)
    async def _body_error(_req: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        loc = ".".join(str(part) for part in first.get("loc", ()) if part != "body")
        return JSONResponse(status_code=400, content=_error_payload("invalid-body", first.get("msg", "invalid request body"), loc or None))

    # --- settings: location ---------------------------------------------------

    @app.get("/api/settings/location")
    def get_location_settings():
        with lock:
            return engine.location.to_json()

    @app.put("/api/settings/location")
    def put_location_settings(payload: dict = Body(...)):
        settings = LocationSettings.from_json(payload, field="")
        with lock:
            warnings = engine.set_location_settings(settings)
            return {"ok": True, "warnings": warnings}

    # --- settings: remote protection -------------------------------------------

    @app.get("/api/settings/rpp")
    def get_rpp_settings():
        with lock:
            return engine.rpp_status()

    @app.put("/api/settings/rpp")
    def put_rpp_settings(payload: dict = Body(...)):
        raw = payload.get("enabled_commands")
        if not isinstance(raw, list):
            raise ValidationError("enabled_commands must be a list", field="enabled_commands", code="malformed")
        verbs = set()
        for name in raw:
            try:
                verbs.add(RppVerb(str(name)))
            except ValueError:
                raise ValidationError(f"unknown command {name!r}", field="enabled_commands", code="unknown_verb") from None
        with lock:
            engine.set_rpp_enabled(verbs)
            return engine.rpp_status()

    @app.post("/api/rpp/passphrase")
    def post_rpp_passphrase(payload: dict = Body(...)):
        passphrase = _require(payload, "passphrase", str)
        with lock:
            engine.set_passphrase(passphrase)
            return engine.rpp_status()

    @app.post("/api/settings/owner-pin")
    def post_owner_pin(payload: dict = Body(...)):
        pin = _require(payload, "pin", str)
        with lock:
            engine.set_owner_pin(pin)
            return {"ok": True}

    # --- guest mode --------------------------------------------------------------

    @app.get("/api/guest/profiles")
    def get_profiles():
        with lock:
            return {"profiles": [p.to_json() for p in engine.profiles.values()]}

    @app.post("/api/guest/profiles")
    def post_profile(payload: dict = Body(...)):
        profile = GuestProfile.from_json(payload, field_path="")
        with lock:
            stored, warnings = engine.create_profile(profile)
            return {"profile": stored.to_json(), "warnings": warnings}

    @app.delete("/api/guest/profiles/{profile_id}")
    def delete_profile(profile_id: str):
        with lock:
            engine.delete_profile(profile_id)
            return {"ok": True}

    @app.post("/api/guest/enter")
    def post_guest_enter(payload: dict = Body(...)):
        profile_id = _require(payload, "profile_id", str)
        auth = _require(payload, "auth", str)
        with lock:
            engine.enter_guest(profile_id, auth)
            return _view_json(engine.effective_view())

    @app.post("/api/guest/exit")
    def post_guest_exit(payload: dict = Body(...)):
        auth = _require(payload, "auth", str)
        with lock:
            engine.exit_guest(auth)
            return _view_json(engine.effective_view())

    @app.get("/api/guest/view")
    def get_guest_view():
        with lock:
            return _view_json(engine.effective_view())

    # --- device simulator ----------------------------------------------------------

    @app.post("/api/device/sms")
    def post_sms(payload: dict = Body(...)):
        sender = _require(payload, "from", str, field="from")
        body = payload.get("body")
        if not isinstance(body, str):
            raise ValidationError("body must be a string", field="body", code="malformed")
        with lock:
            received_at = payload.get("received_at")
            msg = SmsMessage(
                sender=sender, body=body,
                received_at=float(received_at) if received_at is not None else engine.now,
            )
            effects = engine.deliver_sms(msg)
            return {
                "stored": True,
                "effects": [type(e).__name__ for e in effects],
                "inbound_count": len(engine.device.inbound_sms),
            }

    @app.put("/api/device/position")
    def put_position(payload: dict = Body(...)):
        lat = payload.get("lat")
        lon = payload.get("lon")
        if not isinstance(lat, (int, float)) or not isinstance(lon, (int, float)):
            raise ValidationError("lat and lon must be numbers", field="lat", code="malformed")
        with lock:
            ts = payload.get("timestamp")
            fix = GeoFix(lat=lat, lon=lon, timestamp=float(ts) if ts is not None else engine.now)
            engine.set_position(fix)
            return {"ok": True, "clock": engine.now}

    @app.post("/api/device/unlock")
    def post_unlock(payload: dict = Body(...)):
        passphrase = _require(payload, "passphrase", str)
        with lock:
            unlocked = engine.local_unlock(passphrase)
            return {"unlocked": unlocked, "lock": engine.device.lock.value, "rpp": engine.rpp_status()}

    @app.post("/api/device/stores/{kind}/records")
    def post_store_record(kind: str, payload: dict = Body(...)):
        store = parse_store_kind(kind, field="kind")
        with lock:
            count = engine.add_record(store, payload)
            return {"ok": True, "count": count}

    @app.get("/api/device/status")
    def get_status():
        with lock:
            return _status_json(engine)

    @app.get("/api/apps")
    def get_apps(q: str = ""):
        with lock:
            apps = engine.search_apps(q) if q else engine.effective_view().apps
            return {
                "apps": [
                    {"app_id": a.app_id, "display_name": a.display_name, "system_flag": a.system_flag}
                    for a in apps
                ]
            }

    # --- location ---------------------------------------------------------------------

    @app.get("/api/location/query")
    def get_location_query(app: str = ""):
        if not app:
            raise ValidationError("app query parameter is required", field="app", code="missing_field")
        with lock:
            return engine.query_location(app).to_json()

    @app.get("/api/places")
    def get_places(q: str = ""):
        return {"places": [p.to_json() for p in search_places(gazetteer, q)]}

    # --- backup --------------------------------------------------------------------------

    @app.get("/api/backup/destinations")
    def get_destinations():
        with lock:
            return {"destinations": [d.to_json() for d in engine.list_destinations()]}

    @app.post("/api/backup/destinations")
    def post_destination(payload: dict = Body(...)):
        dest = bk.BackupDestination.from_json(payload, field="")
        with lock:
            engine.add_destination(dest)
            return {"destinations": [d.to_json() for d in engine.list_destinations()]}

    @app.delete("/api/backup/destinations/{dest_id}")
    def delete_destination(dest_id: str):
        with lock:
            engine.remove_destination(dest_id)
            return {"destinations": [d.to_json() for d in engine.list_destinations()]}

    @app.post("/api/backup")
    def post_backup(payload: dict = Body(...)):
        selection = _parse_selection(payload.get("stores", "all"))
        dest_id = str(payload.get("destination_id", bk.DEFAULT_DESTINATION_ID))
        with lock:
            archive, key = engine.create_backup(selection, dest_id)
            return {
                "destination_id": dest_id,
                "key": key,
                "checksum": archive.checksum,
                "manifest": archive.manifest,
            }

    @app.post("/api/restore")
    def post_restore(payload: dict = Body(...)):
        auth = _require(payload, "auth", str)
        with lock:
            if "path" in payload:
                path = _require(payload, "path", str)
                try:
                    with open(path, "rb") as fh:
                        data = fh.read()
                except OSError as exc:
                    raise ValidationError(f"cannot read archive file {path!r}: {exc}", field="path", code="unreadable") from exc
            else:
                dest_id = _require(payload, "destination_id", str)
                key = _require(payload, "key", str)
                data = engine.fetch_backup(dest_id, key)
            restored = engine.restore_backup(data, auth)
            return {"ok": True, "restored": sorted(k.value for k in restored)}

    # --- tour, events, export/import --------------------------------------------------------

    @app.get("/api/tour")
    def get_tour_panels(topic: str | None = None):
        return {"panels": [p.to_json() for p in get_tour(panels, topic)]}

    @app.get("/api/events")
    def get_events(since: int = 0):
        with lock:
            records = engine.events.since(since)
            return {"events": [r.to_json() for r in records], "latest": engine.events.latest_seq}

    @app.get("/api/settings/export")
    def get_export():
        with lock:
            return export_settings(engine_settings(engine))

    @app.post("/api/settings/import")
    def post_import(payload: dict = Body(...)):
        location, profiles, warnings = import_settings(payload)
        with lock:
            warnings += engine.set_location_settings(location)
            engine.profiles = {}
            for profile in profiles:
                _, more = engine.create_profile(profile)
                warnings += more
            return {"ok": True, "warnings": warnings}

    # --- simulated remote blob store (3 verbs: put / get / list) ------------------------------

    @app.put("/blobstore/{dest_id}/{key}")
    async def blob_put(dest_id: str, key: str, request: Request):
        data = await request.body()
        with lock:
            store = engine.blob_store(engine._destination(dest_id).endpoint or dest_id)
            store.put(key, data)
            return {"ok": True, "key": key, "bytes": len(data)}

    @app.get("/blobstore/{dest_id}/{key}")
    def blob_get(dest_id: str, key: str):
        with lock:
            data = engine.fetch_backup(dest_id, key)
            return Response(content=data, media_type="application/json")

    @app.get("/blobstore/{dest_id}")
    def blob_list(dest_id: str):
        with lock:
            dest = engine._destination(dest_id)
            store = engine._store_for(dest)
            return {"keys": store.list_keys()}

    # --- UI ----------------------------------------------------------------------------------

    if ui_dir and os.path.isdir(ui_dir):
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

        @app.get("/", include_in_schema=False)
        def index():
            return RedirectResponse(url="/ui/")
    else:
        @app.get("/", include_in_schema=False)
        def index():
            return {"service": "privdash", "api": "/api", "ui": None}

    return app
