/** Location panel: exception search, blur clamping, gazetteer picker. */

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { clampGrid, filterApps, mountLocation } from "../src/location.js";
import { Backend, fire, freshRoot, sleep, startBackend } from "./helpers.js";

let backend: Backend;

beforeAll(async () => {
  backend = await startBackend();
});

afterAll(() => backend.stop());

describe("exception list search", () => {
  it("typing filters the rendered rows to matching apps", async () => {
    const root = freshRoot();
    const panel = mountLocation(root, backend.client);
    await panel.refresh();

    const rows = () => [...root.querySelectorAll(".exception-row")].map((r) => r.getAttribute("data-app"));
    expect(rows()).toContain("maps");
    expect(rows()).toContain("camera");

    const search = root.querySelector<HTMLInputElement>("#exception-search")!;
    search.value = "ma";
    fire(search, "input");
    expect(rows().sort()).toEqual(["mailbox", "maps"]);

    search.value = "zzz";
    fire(search, "input");
    expect(rows()).toEqual([]);
  });

  it("filterApps matches display name and id, case-insensitively", async () => {
    const { apps } = await backend.client.getApps();
    expect(filterApps(apps, "MAP").map((a) => a.app_id)).toContain("maps");
    expect(filterApps(apps, "privacy").map((a) => a.app_id)).toContain("dashboard");
  });
});

describe("blur grid bounds", () => {
  it("the number box clamps 0 and 501 into [1, 500]", async () => {
    const root = freshRoot();
    const panel = mountLocation(root, backend.client);
    await panel.refresh();

    const mode = root.querySelector<HTMLSelectElement>("#global-mode")!;
    mode.value = "blur";
    fire(mode, "change");

    const box = root.querySelector<HTMLInputElement>("#global-grid")!;
    box.value = "501";
    fire(box, "input");
    expect(box.value).toBe("500");

    box.value = "0";
    fire(box, "input");
    expect(box.value).toBe("1");

    const slider = root.querySelector<HTMLInputElement>("#global-grid-slider")!;
    expect(slider.min).toBe("1");
    expect(slider.max).toBe("500");
  });

  it("clampGrid pins the range", () => {
    expect(clampGrid(0)).toBe(1);
    expect(clampGrid(501)).toBe(500);
    expect(clampGrid(250)).toBe(250);
    expect(clampGrid(Number.NaN)).toBe(10);
  });

  it("the server also rejects out-of-range values (defense in depth)", async () => {
    await expect(
      backend.client.putLocationSettings({
        global_default: { mode: "blur", grid_km: 501 },
        exceptions: {},
      }),
    ).rejects.toMatchObject({ status: 400 });
  });
});

describe("fixed-position picker", () => {
  it("choosing Berlin from the place search fills the coordinates", async () => {
    const root = freshRoot();
    const panel = mountLocation(root, backend.client);
    await panel.refresh();

    const mode = root.querySelector<HTMLSelectElement>("#global-mode")!;
    mode.value = "fixed";
    fire(mode, "change");

    const query = root.querySelector<HTMLInputElement>("#global-place")!;
    query.value = "berlin";
    fire(query, "input");
    await sleep(300); // async gazetteer fetch

    const hit = [...root.querySelectorAll<HTMLButtonElement>(".place-hit")].find((b) =>
      b.textContent?.startsWith("Berlin"),
    )!;
    expect(hit).toBeTruthy();
    hit.click();

    expect(root.querySelector<HTMLInputElement>("#global-lat")!.value).toBe("52.52");
    expect(root.querySelector<HTMLInputElement>("#global-lon")!.value).toBe("13.405");
  });

  it("saving the picked position makes every app see it", async () => {
    const saved = await backend.client.putLocationSettings({
      global_default: { mode: "fixed", lat: 52.52, lon: 13.405 },
      exceptions: {},
    });
    expect(saved.ok).toBe(true);
    const reported = await backend.client.queryLocation("camera");
    expect(reported.lat).toBe(52.52);
    expect(reported.lon).toBe(13.405);
  });
});
