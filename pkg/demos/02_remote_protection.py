"""Remote privacy protection: losing a phone and getting it back.

The owner arms protection with a passphrase, loses the phone, and
commands it over plain SMS from a friend's number: ring it, locate it,
watch a thief fail to guess the passphrase, and finally recover the
device - which forces a passphrase rotation.
"""

from privdash import GeoFix, PrivacyEngine, SmsMessage, load_device

engine = PrivacyEngine(load_device({
    "apps": [{"app_id": "messages", "display_name": "Messages"}],
    "stores": {"Contacts": [{"name": "Alice"}, {"name": "Bob"}]},
    "position": {"lat": 52.5200, "lon": 13.4050, "timestamp": 1700000000},
}))


def text_the_phone(body, sender="+491701234567", at=None):
    at = at if at is not None else engine.now + 60
    effects = engine.deliver_sms(SmsMessage(sender=sender, body=body, received_at=at))
    names = [type(e).__name__ for e in effects] or ["nothing"]
    print(f"  SMS from {sender}: {body!r:45} -> {', '.join(names)}")


print("Arming remote protection with passphrase 'tr0pical7'")
engine.set_passphrase("tr0pical7")

print("\nPhone lost. Owner borrows a friend's phone:")
text_the_phone("rpp ring tr0pical7")
print(f"  lock={engine.device.lock.value}, ringer at volume {engine.device.ringer.volume}")

text_the_phone("rpp locate tr0pical7")
print(f"  phone texted back: {engine.device.outbound_sms[-1].body!r}")

print("\nMeanwhile someone holding the phone tries to guess:")
for guess in ("rpp lock letmein", "rpp wipe 123456", "rpp unlock tr0pical7", "hello?"):
    text_the_phone(guess, sender="+15550001111")
print(f"  failed attempts counted: {engine.rpp_state.failed_attempts}")

print("\nPhone recovered. Owner unlocks on the device itself:")
print(f"  wrong passphrase accepted? {engine.local_unlock('letmein')}")
print(f"  right passphrase accepted? {engine.local_unlock('tr0pical7')}")
print(f"  lock={engine.device.lock.value}, ringer off={not engine.device.ringer.ringing}")
print(f"  protection phase: {engine.rpp_state.phase.value} (the old passphrase is burned)")

print("\nRotation: the same passphrase is refused, a fresh one re-arms.")
try:
    engine.set_passphrase("tr0pical7")
except Exception as exc:
    print(f"  set('tr0pical7') -> {exc}")
engine.set_passphrase("new0ne42")
print(f"  set('new0ne42') -> phase {engine.rpp_state.phase.value}")

text_the_phone("rpp lock tr0pical7")
text_the_phone("rpp lock new0ne42")
print(f"  lock={engine.device.lock.value}")
