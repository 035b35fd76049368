"""The operational shell: run the HTTP service and drive it like the dashboard does.

Boots the API over the bundled demo device on a scratch port, walks the
guided tour, configures policies, simulates a remote-protection SMS,
and tails the event feed - everything a browser dashboard would do,
over plain HTTP.
"""

import socket
import threading
import time

import httpx
import uvicorn

from privdash.service.cli import build_service

with socket.socket() as sock:
    sock.bind(("127.0.0.1", 0))
    port = sock.getsockname()[1]

engine, app = build_service()  # bundled demo device, no persistence path
server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=port, log_level="error"))
thread = threading.Thread(target=server.run, daemon=True)
thread.start()
while not server.started:
    time.sleep(0.02)
base = f"http://127.0.0.1:{port}"
print(f"service up at {base}\n")

client = httpx.Client(base_url=base)

print("== Guided tour, rpp topic ==")
for panel in client.get("/api/tour", params={"topic": "rpp"}).json()["panels"]:
    print(f"  {panel['order']}. {panel['title']}")

print("\n== Configure: global blur 25 km, ads off ==")
response = client.put("/api/settings/location", json={
    "global_default": {"mode": "blur", "grid_km": 25},
    "exceptions": {"adboard": {"mode": "off"}},
})
print("  saved, warnings:", response.json()["warnings"])
for app_id in ("maps", "adboard"):
    print(f"  {app_id} sees:", client.get("/api/location/query", params={"app": app_id}).json())

print("\n== Arm remote protection and simulate a command from another phone ==")
client.post("/api/rpp/passphrase", json={"passphrase": "demo1pass"})
result = client.post("/api/device/sms", json={"from": "+4917098765", "body": "rpp ring demo1pass"}).json()
print("  effects:", result["effects"])
status = client.get("/api/device/status").json()
print(f"  device: lock={status['lock']}, ringing={status['ringer']['ringing']}")

print("\n== Event feed (what a dashboard would poll) ==")
for event in client.get("/api/events", params={"since": 0}).json()["events"]:
    print(f"  #{event['seq']:<3} {event['kind']:<16} {event['detail']}")

server.should_exit = True
thread.join(timeout=5)
print("\nservice stopped.")
