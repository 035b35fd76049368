"""Secondary-user mode: handing the phone to a child, getting it back intact.

A parent builds a reusable 'kids' profile: only the camera visible,
contacts and messages emptied, cellular data off. The child snaps
photos (kept - photos are unprotected here) and adds a contact
(discarded - contacts are protected). On exit the owner's data is back,
bit for bit.
"""

from privdash import PrivacyEngine, StoreKind, ResourceKind, load_device
from privdash.guest import GuestProfile

engine = PrivacyEngine(load_device({
    "apps": [
        {"app_id": "settings", "display_name": "Settings", "system_flag": True},
        {"app_id": "dashboard", "display_name": "Privacy Dashboard", "system_flag": True},
        {"app_id": "camera", "display_name": "Camera"},
        {"app_id": "messages", "display_name": "Messages"},
        {"app_id": "browser", "display_name": "Browser"},
    ],
    "stores": {
        "Contacts": [{"name": "Alice"}, {"name": "Bob"}, {"name": "Carol"}],
        "SmsHistory": [{"with": "Alice", "body": "don't forget the cake"}],
        "Photos": [{"file": "holiday.jpg"}],
    },
}))
engine.set_owner_pin("4711")

profile, warnings = engine.create_profile(GuestProfile(
    profile_id="kids",
    name="Kids",
    visible_apps=frozenset({"camera", "settings"}),  # settings will be stripped
    protected_stores=frozenset({StoreKind.CONTACTS, StoreKind.SMS_HISTORY}),
    resource_overrides={ResourceKind.CELLULAR_DATA: False},
))
print("Created profile 'kids'.", *(f"\n  warning: {w}" for w in warnings))


def show(label):
    view = engine.effective_view()
    print(f"\n{label}")
    print(f"  visible apps : {[a.display_name for a in view.apps]}")
    print(f"  contacts     : {len(view.stores[StoreKind.CONTACTS])}, "
          f"sms: {len(view.stores[StoreKind.SMS_HISTORY])}, "
          f"photos: {len(view.stores[StoreKind.PHOTOS])}")
    print(f"  cellular data: {view.resources[ResourceKind.CELLULAR_DATA]}")
    print(f"  search 'mess': {[a.app_id for a in engine.search_apps('mess')] or 'no results'}")


show("Owner view before handing over:")

engine.enter_guest("kids", "4711")
show("Child's view (session active):")

print("\nChild takes two photos and adds a contact...")
engine.add_record(StoreKind.PHOTOS, {"file": "kid-art-1.jpg"})
engine.add_record(StoreKind.PHOTOS, {"file": "kid-art-2.jpg"})
engine.add_record(StoreKind.CONTACTS, {"name": "SchoolFriend"})
print(f"  guest sees contacts: {[r['name'] for r in engine.query_store(StoreKind.CONTACTS)]}")

try:
    engine.exit_guest("1234")
except Exception as exc:
    print(f"\nChild tries to exit with a guessed PIN: {exc}")

engine.exit_guest("4711")
show("Owner view after taking the phone back:")
print("\nThe guest's contact is gone (protected store restored exactly);")
print("the photos survived (unprotected store is shared). The profile is")
print("stored and reusable for the next handover.")
