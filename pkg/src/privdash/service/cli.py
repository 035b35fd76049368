"""Command-line interface.

``privdash serve`` runs the HTTP service over a simulated device; every
other verb is a thin client of a running service, so the CLI, the
dashboard UI and the tests all exercise the identical API surface (and
the engine stays single-writer).

Configuration precedence: flags, then PRIVDASH_* environment variables,
then the JSON config file, then defaults.
"""

from __future__ import annotations

import json
import os
import sys
from importlib import resources

import click
import httpx

from ..device import load_device, parse_track
from ..engine import PrivacyEngine
from ..errors import PrivdashError
from .app import create_app
from .settings import SettingsDocument, apply_settings, load_settings, save_settings

DEFAULT_PORT = 8899
DEFAULT_HOST = "127.0.0.1"
DEFAULT_STATE_PATH = "privdash-state.json"

ENV_CONFIG = "PRIVDASH_CONFIG"
ENV_PORT = "PRIVDASH_PORT"
ENV_HOST = "PRIVDASH_HOST"
ENV_DEVICE_CONFIG = "PRIVDASH_DEVICE_CONFIG"
ENV_STATE_PATH = "PRIVDASH_STATE_PATH"
ENV_UI_DIR = "PRIVDASH_UI_DIR"
ENV_URL = "PRIVDASH_URL"


def _load_config_file(path: str | None) -> dict:
    path = path or os.environ.get(ENV_CONFIG)
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise click.ClickException(f"config file {path!r}: {exc.msg} at line {exc.lineno}") from exc
    if not isinstance(doc, dict):
        raise click.ClickException(f"config file {path!r} must contain a JSON object")
    return doc


def _resolve(flag, env_name: str, file_config: dict, file_key: str, default):
    if flag is not None:
        return flag
    if os.environ.get(env_name):
        return os.environ[env_name]
    if file_key in file_config:
        return file_config[file_key]
    return default


def _base_url(url: str | None, config_path: str | None) -> str:
    if url:
        return url.rstrip("/")
    if os.environ.get(ENV_URL):
        return os.environ[ENV_URL].rstrip("/")
    file_config = _load_config_file(config_path)
    host = _resolve(None, ENV_HOST, file_config, "host", DEFAULT_HOST)
    port = int(_resolve(None, ENV_PORT, file_config, "port", DEFAULT_PORT))
    return f"http://{host}:{port}"


def _call(method: str, url: str, **kwargs):
    try:
        response = httpx.request(method, url, timeout=30.0, **kwargs)
    except httpx.HTTPError as exc:
        raise click.ClickException(f"cannot reach service at {url}: {exc}") from exc
    if response.status_code >= 400:
        try:
            error = response.json().get("error", {})
            detail = error.get("message", response.text)
            code = error.get("code", response.status_code)
        except ValueError:
            detail, code = response.text, response.status_code
        raise click.ClickException(f"{code}: {detail}")
    return response


def _print_json(data) -> None:
    click.echo(json.dumps(data, indent=2, sort_keys=True))


def build_service(
    device_config: str | None = None,
    state_path: str | None = None,
    ui_dir: str | None = None,
) -> tuple[PrivacyEngine, object]:
    """Assemble engine + app from a device config and a persistence path."""
    if device_config:
        with open(device_config, encoding="utf-8") as fh:
            device = load_device(fh.read())
    else:
        device = load_device(resources.files("privdash.data").joinpath("demo-device.json").read_text("utf-8"))
    engine = PrivacyEngine(device)
    if state_path and os.path.exists(state_path):
        apply_settings(engine, load_settings(state_path))
    elif state_path:
        save_settings(state_path, SettingsDocument())
    app = create_app(engine, settings_path=state_path, ui_dir=ui_dir)
    return engine, app


@click.group()
def main():
    """Privacy dashboard service and client."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), help="JSON config file.")
@click.option("--port", type=int, default=None, help=f"Listen port (default {DEFAULT_PORT}).")
@click.option("--host", default=None, help=f"Bind address (default {DEFAULT_HOST}).")
@click.option("--device-config", "device_config", type=click.Path(exists=True), default=None,
              help="Device config document (defaults to the bundled demo device).")
@click.option("--state", "state_path", default=None,
              help=f"Settings persistence file (default {DEFAULT_STATE_PATH}).")
@click.option("--ui-dir", default=None, help="Directory of built dashboard assets to serve at /ui.")
def serve(config_path, port, host, device_config, state_path, ui_dir):
    """Run the HTTP service over the simulated device."""
    import uvicorn

    file_config = _load_config_file(config_path)
    port = int(_resolve(port, ENV_PORT, file_config, "port", DEFAULT_PORT))
    host = _resolve(host, ENV_HOST, file_config, "host", DEFAULT_HOST)
    device_config = _resolve(device_config, ENV_DEVICE_CONFIG, file_config, "device_config", None)
    state_path = _resolve(state_path, ENV_STATE_PATH, file_config, "state_path", DEFAULT_STATE_PATH)
    ui_dir = _resolve(ui_dir, ENV_UI_DIR, file_config, "ui_dir", None)
    try:
        _, app = build_service(device_config, state_path, ui_dir)
    except PrivdashError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(f"privdash listening on http://{host}:{port} (state: {state_path})")
    uvicorn.run(app, host=host, port=port, log_level="warning")


_url_option = click.option("--url", default=None, help="Service base URL (default from config/env).")
_config_option = click.option("--config", "config_path", type=click.Path(exists=True), default=None, help="JSON config file.")


@main.command("send-sms")
@click.option("--from", "sender", required=True, help="Sender phone number.")
@click.option("--body", required=True, help="Message text.")
@_url_option
@_config_option
def send_sms(sender, body, url, config_path):
    """Deliver an SMS to the simulated device."""
    base = _base_url(url, config_path)
    _print_json(_call("POST", f"{base}/api/device/sms", json={"from": sender, "body": body}).json())


@main.command("set-position")
@click.option("--lat", type=float, default=None)
@click.option("--lon", type=float, default=None)
@click.option("--timestamp", type=float, default=None)
@click.option("--track", type=click.Path(exists=True), default=None, help="Replay a 'timestamp lat lon' track file.")
@_url_option
@_config_option
def set_position(lat, lon, timestamp, track, url, config_path):
    """Set the device's true position, or replay a GPS track."""
    base = _base_url(url, config_path)
    if track:
        with open(track, encoding="utf-8") as fh:
            try:
                fixes = parse_track(fh.read())
            except PrivdashError as exc:
                raise click.ClickException(str(exc)) from exc
        for fix in fixes:
            _call("PUT", f"{base}/api/device/position",
                  json={"lat": fix.lat, "lon": fix.lon, "timestamp": fix.timestamp})
        click.echo(f"replayed {len(fixes)} fixes")
        return
    if lat is None or lon is None:
        raise click.ClickException("either --track or both --lat and --lon are required")
    payload = {"lat": lat, "lon": lon}
    if timestamp is not None:
        payload["timestamp"] = timestamp
    _print_json(_call("PUT", f"{base}/api/device/position", json=payload).json())


@main.command("query-location")
@click.option("--app", "app_id", required=True, help="App id to query as.")
@_url_option
@_config_option
def query_location(app_id, url, config_path):
    """The location the named app would receive right now."""
    base = _base_url(url, config_path)
    _print_json(_call("GET", f"{base}/api/location/query", params={"app": app_id}).json())


@main.group()
def guest():
    """Guest (secondary-user) sessions."""


@guest.command("enter")
@click.option("--profile", "profile_id", required=True)
@click.option("--auth", required=True, help="Owner credential (protection passphrase or PIN).")
@_url_option
@_config_option
def guest_enter(profile_id, auth, url, config_path):
    base = _base_url(url, config_path)
    _print_json(_call("POST", f"{base}/api/guest/enter", json={"profile_id": profile_id, "auth": auth}).json())


@guest.command("exit")
@click.option("--auth", required=True)
@_url_option
@_config_option
def guest_exit(auth, url, config_path):
    base = _base_url(url, config_path)
    _print_json(_call("POST", f"{base}/api/guest/exit", json={"auth": auth}).json())


@main.group()
def backup():
    """Backups to a chosen destination."""


@backup.command("create")
@click.option("--stores", default="all", help="Comma-separated store kinds, or 'all'.")
@click.option("--dest", "dest_id", default="default", help="Destination id.")
@_url_option
@_config_option
def backup_create(stores, dest_id, url, config_path):
    base = _base_url(url, config_path)
    selection = "all" if stores == "all" else [s.strip() for s in stores.split(",") if s.strip()]
    _print_json(_call("POST", f"{base}/api/backup", json={"stores": selection, "destination_id": dest_id}).json())


@backup.command("restore")
@click.option("--file", "path", type=click.Path(exists=True), default=None, help="Local archive file.")
@click.option("--dest", "dest_id", default=None, help="Destination id to fetch from.")
@click.option("--key", default=None, help="Archive key at the destination.")
@click.option("--auth", required=True, help="Owner credential.")
@_url_option
@_config_option
def backup_restore(path, dest_id, key, auth, url, config_path):
    base = _base_url(url, config_path)
    if path:
        payload = {"auth": auth, "path": os.path.abspath(path)}
    elif dest_id and key:
        payload = {"auth": auth, "destination_id": dest_id, "key": key}
    else:
        raise click.ClickException("either --file or both --dest and --key are required")
    _print_json(_call("POST", f"{base}/api/restore", json=payload).json())


@main.group()
def settings():
    """Export and import shareable settings."""


@settings.command("export")
@click.option("--out", "out_path", type=click.Path(), default=None, help="Write blob to a file (default stdout).")
@_url_option
@_config_option
def settings_export(out_path, url, config_path):
    base = _base_url(url, config_path)
    blob = _call("GET", f"{base}/api/settings/export").json()
    text = json.dumps(blob, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        click.echo(f"exported settings to {out_path}")
    else:
        click.echo(text)


@settings.command("import")
@click.option("--file", "path", type=click.Path(exists=True), required=True)
@_url_option
@_config_option
def settings_import(path, url, config_path):
    base = _base_url(url, config_path)
    with open(path, encoding="utf-8") as fh:
        try:
            blob = json.load(fh)
        except json.JSONDecodeError as exc:
            raise click.ClickException(f"{path}: {exc.msg} at line {exc.lineno}") from exc
    _print_json(_call("POST", f"{base}/api/settings/import", json=blob).json())


@main.group()
def tour():
    """Guided-tour content."""


@tour.command("show")
@click.option("--topic", default=None, help="One of overview, location, rpp, guest, backup.")
@_url_option
@_config_option
def tour_show(topic, url, config_path):
    base = _base_url(url, config_path)
    params = {"topic": topic} if topic else {}
    data = _call("GET", f"{base}/api/tour", params=params).json()
    for panel in data["panels"]:
        click.echo(f"[{panel['topic']}/{panel['order']}] {panel['title']}")
        click.echo(f"    {panel['body']}")


if __name__ == "__main__":
    main()
