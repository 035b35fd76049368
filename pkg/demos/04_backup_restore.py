"""Backup to a destination of your choosing, verify, tamper, restore.

Creates archives on the simulated default server and in a local
directory, shows the manifest and checksum, corrupts one byte and
watches the restore refuse, then restores for real.
"""

import tempfile

from privdash import PrivacyEngine, StoreKind, load_device
from privdash.backup import BackupDestination, DestinationKind
from privdash.device import replace_store
from privdash.errors import IntegrityError

engine = PrivacyEngine(load_device({
    "apps": [{"app_id": "mail", "display_name": "Mail"}],
    "stores": {
        "Contacts": [{"name": "Alice", "phone": "+1"}, {"name": "Bob", "phone": "+2"}],
        "Emails": [{"from": "alice@example.org", "subject": "re: weekend"}],
    },
}))
engine.set_owner_pin("4711")

local_dir = tempfile.mkdtemp(prefix="privdash-backups-")
engine.add_destination(BackupDestination(
    dest_id="laptop", kind=DestinationKind.LOCAL_PATH, name="My laptop", path=local_dir,
))
print("Destinations:", [d.name for d in engine.list_destinations()])

archive, key = engine.create_backup({StoreKind.CONTACTS, StoreKind.EMAILS}, "laptop")
print(f"\nArchived to {local_dir}/{key}")
print("  manifest:", archive.manifest["stores"])
print("  checksum:", archive.checksum[:32], "...")

data = engine.fetch_backup("laptop", key)

print("\nSimulating damage: flipping one payload byte...")
damaged = bytearray(data)
damaged[data.index(b'"payload"') + 20] ^= 0x01
try:
    engine.restore_backup(bytes(damaged), "4711")
except IntegrityError as exc:
    print(f"  restore refused: {exc}")
print(f"  device contacts untouched: {len(engine.query_store(StoreKind.CONTACTS))}")

print("\nDisaster strikes: all stores emptied.")
for kind in StoreKind:
    engine.device = replace_store(engine.device, kind, ())
print(f"  contacts now: {len(engine.query_store(StoreKind.CONTACTS))}")

restored = engine.restore_backup(data, "4711")
print(f"\nRestored {sorted(k.value for k in restored)} from the intact archive.")
print(f"  contacts back: {[r['name'] for r in engine.query_store(StoreKind.CONTACTS)]}")

archive2, key2 = engine.create_backup({StoreKind.CONTACTS}, "default")
print(f"\nA second copy went to the default server as {key2!r};")
print("  server now holds:", engine.blob_store("mem://default").list_keys())
