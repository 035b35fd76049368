/**
 * Backup panel: manage destinations (the default server is pinned),
 * create archives of chosen stores, and restore with the owner
 * credential - surfacing the checksum so tampering is visible.
 */

import { ApiClient, Destination } from "./api.js";
import { el, replaceChildrenOf } from "./dom.js";
import { STORE_KINDS } from "./guest.js";

export function renderDestinations(destinations: Destination[], onRemove: (id: string) => void): HTMLElement {
  return el(
    "ul",
    { class: "destinations", id: "destination-list" },
    destinations.map((dest) =>
      el("li", { "data-dest": dest.dest_id }, [
        `${dest.name} [${dest.kind}] `,
        el("code", {}, [dest.endpoint ?? dest.path ?? ""]),
        ...(dest.dest_id === "default"
          ? []
          : [el("button", { class: "dest-remove", onclick: () => onRemove(dest.dest_id) }, ["remove"])]),
      ]),
    ),
  );
}

export function mountBackup(root: HTMLElement, client: ApiClient, onChanged: () => void): { refresh: () => Promise<void> } {
  const container = el("div", { class: "backup-panel" });
  root.append(container);
  // survive re-renders: the checksum line is the point of the panel
  const message = el("p", { class: "warnings", id: "backup-message" });
  const result = el("p", { class: "backup-result", id: "backup-result" });

  async function refresh(): Promise<void> {
    const { destinations } = await client.getDestinations();
    render(destinations);
  }

  function render(destinations: Destination[]): void {
    const list = renderDestinations(destinations, (destId) => {
      void (async () => {
        try {
          await client.removeDestination(destId);
          await refresh();
        } catch (error) {
          message.textContent = String(error);
        }
      })();
    });

    const newId = el("input", { type: "text", id: "dest-id", placeholder: "destination id" });
    const newKind = el("select", { id: "dest-kind" }, [
      el("option", { value: "provider" }, ["storage provider"]),
      el("option", { value: "local_path" }, ["my own machine (path)"]),
    ]);
    const newTarget = el("input", { type: "text", id: "dest-target", placeholder: "endpoint or path" });
    const addButton = el("button", {
      id: "dest-add",
      onclick: () => {
        void (async () => {
          try {
            const kind = newKind.value;
            await client.addDestination({
              dest_id: newId.value,
              kind,
              name: newId.value,
              ...(kind === "local_path" ? { path: newTarget.value } : { endpoint: newTarget.value }),
            });
            await refresh();
          } catch (error) {
            message.textContent = String(error);
          }
        })();
      },
    }, ["Add destination"]);

    const storeBoxes = STORE_KINDS.map((kind) => {
      const box = el("input", { type: "checkbox", id: `backup-store-${kind}`, "data-store": kind });
      box.checked = true;
      return { box, row: el("label", { class: "pick" }, [box, ` ${kind}`]) };
    });
    const destSelect = el(
      "select",
      { id: "backup-dest" },
      destinations.map((dest) => el("option", { value: dest.dest_id }, [dest.name])),
    );
    const createButton = el("button", {
      id: "backup-create",
      onclick: () => {
        void (async () => {
          try {
            const stores = storeBoxes.filter(({ box }) => box.checked).map(({ box }) => box.dataset.store as string);
            const created = await client.createBackup(stores, destSelect.value);
            result.textContent = `archive ${created.key} checksum ${created.checksum}`;
            await refresh();
            onChanged();
          } catch (error) {
            message.textContent = String(error);
          }
        })();
      },
    }, ["Create backup"]);

    const restoreDest = el(
      "select",
      { id: "restore-dest" },
      destinations.map((dest) => el("option", { value: dest.dest_id }, [dest.name])),
    );
    const restoreKey = el("input", { type: "text", id: "restore-key", placeholder: "archive key" });
    const restoreAuth = el("input", { type: "password", id: "restore-auth", placeholder: "owner credential", autocomplete: "off" });
    const listButton = el("button", {
      id: "restore-list",
      onclick: () => {
        void (async () => {
          try {
            const { keys } = await client.listArchives(restoreDest.value);
            message.textContent = keys.length ? `archives: ${keys.join(", ")}` : "no archives at destination";
          } catch (error) {
            message.textContent = String(error);
          }
        })();
      },
    }, ["List archives"]);
    const restoreButton = el("button", {
      id: "restore-run",
      onclick: () => {
        void (async () => {
          try {
            const restored = await client.restore({
              auth: restoreAuth.value,
              destination_id: restoreDest.value,
              key: restoreKey.value,
            });
            restoreAuth.value = "";
            message.textContent = `restored: ${restored.restored.join(", ")}`;
            onChanged();
          } catch (error) {
            message.textContent = String(error);
          }
        })();
      },
    }, ["Restore"]);

    replaceChildrenOf(container, [
      el("h2", {}, ["Backup"]),
      el("h3", {}, ["Destinations"]),
      list,
      el("div", { class: "dest-form" }, [newId, newKind, newTarget, addButton]),
      el("h3", {}, ["Create"]),
      el("div", { class: "backup-form" }, [...storeBoxes.map(({ row }) => row), destSelect, createButton]),
      result,
      el("h3", {}, ["Restore"]),
      el("div", { class: "restore-form" }, [restoreDest, restoreKey, restoreAuth, listButton, restoreButton]),
      message,
    ]);
  }

  return { refresh };
}
