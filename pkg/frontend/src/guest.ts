/**
 * Guest-mode panel: profile editor (apps / stores / resources), live
 * enter/exit with the owner credential, and a store preview that always
 * reflects the server's effective view.
 */

import { ApiClient, GuestProfile, GuestView } from "./api.js";
import { el, replaceChildrenOf } from "./dom.js";

export const STORE_KINDS = [
  "Contacts", "CallHistory", "SmsHistory", "Emails", "Photos", "BrowserHistory",
] as const;
export const RESOURCE_KINDS = ["WiFi", "CellularData"] as const;

export function renderStorePreview(view: GuestView): HTMLElement {
  return el(
    "table",
    { class: "store-preview", id: "store-preview" },
    [
      el("thead", {}, [el("tr", {}, [el("th", {}, ["store"]), el("th", {}, ["records"])])]),
      el(
        "tbody",
        {},
        STORE_KINDS.map((kind) =>
          el("tr", { "data-store": kind }, [
            el("td", {}, [kind]),
            el("td", { class: "store-count" }, [String((view.stores[kind] ?? []).length)]),
          ]),
        ),
      ),
    ],
  );
}

export function renderVisibleApps(view: GuestView): HTMLElement {
  return el(
    "ul",
    { class: "visible-apps", id: "visible-apps" },
    view.apps.map((app) => el("li", { "data-app": app.app_id }, [app.display_name])),
  );
}

export function mountGuest(root: HTMLElement, client: ApiClient, onChanged: () => void): { refresh: () => Promise<void> } {
  const container = el("div", { class: "guest-panel" });
  root.append(container);
  // survives re-renders so outcomes stay readable after a refresh
  const message = el("p", { class: "warnings", id: "guest-message" });

  async function refresh(): Promise<void> {
    const [view, { profiles }, { apps }] = await Promise.all([
      client.getGuestView(),
      client.getProfiles(),
      client.getApps(),
    ]);
    render(view, profiles, apps.map((a) => a.app_id));
  }

  function render(view: GuestView, profiles: GuestProfile[], appIds: string[]): void {
    const sessionBadge = el(
      "p",
      { class: view.session_active ? "session-badge active" : "session-badge", id: "session-badge" },
      [view.session_active ? `guest session active (${view.profile_id})` : "no guest session"],
    );

    const profileSelect = el(
      "select",
      { id: "guest-profile-select" },
      profiles.map((p) => el("option", { value: p.profile_id }, [`${p.name} (${p.profile_id})`])),
    );
    const auth = el("input", { type: "password", id: "guest-auth", placeholder: "owner credential", autocomplete: "off" });
    const enterButton = el("button", {
      id: "guest-enter",
      onclick: () => act(() => client.guestEnter(profileSelect.value, auth.value)),
    }, ["Enter guest mode"]);
    const exitButton = el("button", {
      id: "guest-exit",
      onclick: () => act(() => client.guestExit(auth.value)),
    }, ["Exit guest mode"]);

    function act(call: () => Promise<GuestView>): void {
      void (async () => {
        try {
          await call();
          auth.value = "";
          await refresh();
          onChanged();
        } catch (error) {
          message.textContent = String(error);
        }
      })();
    }

    // profile creation form
    const newId = el("input", { type: "text", id: "new-profile-id", placeholder: "profile id" });
    const newName = el("input", { type: "text", id: "new-profile-name", placeholder: "name" });
    const appBoxes = appIds.map((appId) => {
      const box = el("input", { type: "checkbox", id: `new-visible-${appId}`, "data-app": appId });
      return { box, row: el("label", { class: "pick" }, [box, ` ${appId}`]) };
    });
    const storeBoxes = STORE_KINDS.map((kind) => {
      const box = el("input", { type: "checkbox", id: `new-protect-${kind}`, "data-store": kind });
      box.checked = true;
      return { box, row: el("label", { class: "pick" }, [box, ` ${kind}`]) };
    });
    const resourceBoxes = RESOURCE_KINDS.map((kind) => {
      const box = el("input", { type: "checkbox", id: `new-resource-${kind}`, "data-resource": kind });
      box.checked = true;
      return { box, row: el("label", { class: "pick" }, [box, ` ${kind}`]) };
    });
    const createButton = el("button", {
      id: "profile-create",
      onclick: () => {
        void (async () => {
          try {
            const result = await client.createProfile({
              profile_id: newId.value,
              name: newName.value || newId.value,
              visible_apps: appBoxes.filter(({ box }) => box.checked).map(({ box }) => box.dataset.app as string),
              protected_stores: storeBoxes.filter(({ box }) => box.checked).map(({ box }) => box.dataset.store as string),
              resource_overrides: Object.fromEntries(
                resourceBoxes.map(({ box }) => [box.dataset.resource as string, box.checked]),
              ),
            });
            message.textContent = result.warnings.join("; ") || `profile ${result.profile.profile_id} saved`;
            await refresh();
          } catch (error) {
            message.textContent = String(error);
          }
        })();
      },
    }, ["Create profile"]);

    replaceChildrenOf(container, [
      el("h2", {}, ["Guest mode"]),
      sessionBadge,
      el("div", { class: "guest-controls" }, [profileSelect, auth, enterButton, exitButton]),
      el("h3", {}, ["What the current holder sees"]),
      renderVisibleApps(view),
      renderStorePreview(view),
      el("h3", {}, ["New profile"]),
      el("div", { class: "profile-form" }, [
        newId, newName,
        el("fieldset", {}, [el("legend", {}, ["visible apps"]), ...appBoxes.map(({ row }) => row)]),
        el("fieldset", {}, [el("legend", {}, ["protected stores (emptied for the guest)"]), ...storeBoxes.map(({ row }) => row)]),
        el("fieldset", {}, [el("legend", {}, ["resources enabled"]), ...resourceBoxes.map(({ row }) => row)]),
        createButton,
      ]),
      message,
    ]);
  }

  return { refresh };
}
