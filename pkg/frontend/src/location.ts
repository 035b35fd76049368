/**
 * Location accuracy panel: one global policy, then a searchable
 * exception list. The blur slider and its number box clamp to [1, 500];
 * the fixed-position picker is backed by the gazetteer search. Saving
 * PUTs the whole settings object; the server is authoritative and the
 * panel re-renders from its response.
 */

import { ApiClient, AppInfo, LocationSettings, Policy } from "./api.js";
import { el, replaceChildrenOf } from "./dom.js";

export const GRID_MIN = 1;
export const GRID_MAX = 500;

export function clampGrid(value: number): number {
  if (Number.isNaN(value)) return 10;
  return Math.min(GRID_MAX, Math.max(GRID_MIN, value));
}

export function filterApps(apps: AppInfo[], query: string): AppInfo[] {
  const needle = query.toLowerCase();
  return apps.filter(
    (app) =>
      app.display_name.toLowerCase().includes(needle) || app.app_id.toLowerCase().includes(needle),
  );
}

export function describePolicy(policy: Policy): string {
  switch (policy.mode) {
    case "off":
      return "off (null coordinates)";
    case "precise":
      return "precise";
    case "fixed":
      return `fixed at ${policy.lat?.toFixed(4)}, ${policy.lon?.toFixed(4)}`;
    case "blur":
      return `blur to ${policy.grid_km} km`;
  }
}

/** A mode selector + parameter fields; used for the global policy and per-app exceptions. */
export function policyEditor(initial: Policy, idPrefix: string, client: ApiClient): {
  root: HTMLElement;
  read: () => Policy;
} {
  const mode = el("select", { id: `${idPrefix}-mode` }, [
    el("option", { value: "off" }, ["Turn location off"]),
    el("option", { value: "precise" }, ["Give precise location"]),
    el("option", { value: "fixed" }, ["Choose a position"]),
    el("option", { value: "blur" }, ["Blur by X km"]),
  ]);
  mode.value = initial.mode;

  const slider = el("input", {
    type: "range", min: GRID_MIN, max: GRID_MAX, step: 1,
    id: `${idPrefix}-grid-slider`, class: "grid-slider",
  });
  const gridBox = el("input", {
    type: "number", min: GRID_MIN, max: GRID_MAX,
    id: `${idPrefix}-grid`, class: "grid-box",
  });
  slider.value = String(initial.grid_km ?? 10);
  gridBox.value = String(initial.grid_km ?? 10);
  slider.addEventListener("input", () => {
    gridBox.value = String(clampGrid(Number(slider.value)));
  });
  gridBox.addEventListener("input", () => {
    gridBox.value = String(clampGrid(Number(gridBox.value)));
    slider.value = gridBox.value;
  });

  const lat = el("input", { type: "number", step: "any", id: `${idPrefix}-lat`, placeholder: "latitude" });
  const lon = el("input", { type: "number", step: "any", id: `${idPrefix}-lon`, placeholder: "longitude" });
  lat.value = initial.lat !== undefined ? String(initial.lat) : "";
  lon.value = initial.lon !== undefined ? String(initial.lon) : "";

  const placeQuery = el("input", { type: "search", id: `${idPrefix}-place`, placeholder: "search city or country" });
  const placeResults = el("div", { class: "place-results" });
  placeQuery.addEventListener("input", () => {
    void (async () => {
      if (!placeQuery.value) {
        replaceChildrenOf(placeResults, []);
        return;
      }
      const { places } = await client.getPlaces(placeQuery.value);
      replaceChildrenOf(
        placeResults,
        places.slice(0, 8).map((place) =>
          el("button", {
            class: "place-hit",
            onclick: () => {
              lat.value = String(place.lat);
              lon.value = String(place.lon);
              placeQuery.value = place.name;
              replaceChildrenOf(placeResults, []);
            },
          }, [`${place.name} (${place.kind})`]),
        ),
      );
    })();
  });

  const blurRow = el("div", { class: "policy-params blur-params" }, [slider, gridBox, el("span", {}, ["km"])]);
  const fixedRow = el("div", { class: "policy-params fixed-params" }, [placeQuery, placeResults, lat, lon]);

  function sync(): void {
    blurRow.style.display = mode.value === "blur" ? "" : "none";
    fixedRow.style.display = mode.value === "fixed" ? "" : "none";
  }
  mode.addEventListener("change", sync);
  sync();

  return {
    root: el("div", { class: "policy-editor" }, [mode, blurRow, fixedRow]),
    read: () => {
      if (mode.value === "blur") return { mode: "blur", grid_km: clampGrid(Number(gridBox.value)) };
      if (mode.value === "fixed") return { mode: "fixed", lat: Number(lat.value), lon: Number(lon.value) };
      return { mode: mode.value as Policy["mode"] };
    },
  };
}

export function mountLocation(root: HTMLElement, client: ApiClient): { refresh: () => Promise<void> } {
  const container = el("div", { class: "location-panel" });
  root.append(container);
  // survives re-renders so save outcomes stay readable after a refresh
  const warnings = el("p", { class: "warnings", id: "location-warnings" });

  async function refresh(): Promise<void> {
    const [settings, { apps }] = await Promise.all([client.getLocationSettings(), client.getApps()]);
    render(settings, apps);
  }

  function render(settings: LocationSettings, apps: AppInfo[]): void {
    const global = policyEditor(settings.global_default, "global", client);

    const exceptionRows = el("div", { class: "exception-rows", id: "exception-rows" });
    const editors = new Map<string, ReturnType<typeof policyEditor>>();

    const renderRows = (visible: AppInfo[]) => {
      replaceChildrenOf(
        exceptionRows,
        visible.map((app) => {
          const existing = settings.exceptions[app.app_id];
          const row = el("div", { class: "exception-row", "data-app": app.app_id });
          const label = el("label", {}, [`${app.display_name} `, el("code", {}, [app.app_id])]);
          const toggle = el("input", { type: "checkbox", "data-role": "exception-toggle" });
          toggle.checked = existing !== undefined;
          const editor = policyEditor(existing ?? { mode: "precise" }, `exc-${app.app_id}`, client);
          editor.root.style.display = toggle.checked ? "" : "none";
          toggle.addEventListener("change", () => {
            editor.root.style.display = toggle.checked ? "" : "none";
            if (toggle.checked) editors.set(app.app_id, editor);
            else editors.delete(app.app_id);
          });
          if (toggle.checked) editors.set(app.app_id, editor);
          row.append(toggle, label, editor.root);
          return row;
        }),
      );
    };

    const search = el("input", {
      type: "search", id: "exception-search", placeholder: "search apps",
      oninput: () => renderRows(filterApps(apps, search.value)),
    });
    renderRows(apps);

    const save = el("button", {
      id: "location-save",
      onclick: () => {
        void (async () => {
          const payload: LocationSettings = { global_default: global.read(), exceptions: {} };
          for (const [appId, editor] of editors) payload.exceptions[appId] = editor.read();
          try {
            const result = await client.putLocationSettings(payload);
            warnings.textContent = result.warnings.join("; ") || "saved";
            await refresh();
          } catch (error) {
            warnings.textContent = String(error);
          }
        })();
      },
    }, ["Save location settings"]);

    replaceChildrenOf(container, [
      el("h2", {}, ["Location accuracy"]),
      el("p", { class: "hint" }, ["One default rule for every app; list the exceptions below."]),
      global.root,
      el("h3", {}, ["Exceptions"]),
      search,
      exceptionRows,
      save,
      warnings,
    ]);
  }

  return { refresh };
}
