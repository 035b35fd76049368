/** Test harness: spawn a fresh backend per file and build a DOM root. */

import { ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { ApiClient } from "../src/api.js";

export interface Backend {
  url: string;
  client: ApiClient;
  stop: () => void;
}

const DEVICE_CONFIG = {
  apps: [
    { app_id: "settings", display_name: "Settings", system_flag: true },
    { app_id: "dashboard", display_name: "Privacy Dashboard", system_flag: true },
    { app_id: "maps", display_name: "Maps" },
    { app_id: "camera", display_name: "Camera" },
    { app_id: "mailbox", display_name: "Mailbox" },
  ],
  stores: {
    Contacts: [{ name: "Alice" }, { name: "Bob" }, { name: "Cara" }],
    Photos: [{ file: "a.jpg" }],
  },
  resources: { WiFi: true, CellularData: true },
  position: { lat: 52.52, lon: 13.405, timestamp: 1700000000 },
};

export async function startBackend(): Promise<Backend> {
  const dir = mkdtempSync(join(tmpdir(), "privdash-ui-"));
  const devicePath = join(dir, "device.json");
  writeFileSync(devicePath, JSON.stringify(DEVICE_CONFIG));

  let lastError: unknown;
  for (let attempt = 0; attempt < 3; attempt++) {
    const port = 20000 + Math.floor(Math.random() * 20000);
    const url = `http://127.0.0.1:${port}`;
    const child: ChildProcess = spawn(
      "python3",
      [
        "-m", "privdash.service.cli", "serve",
        "--port", String(port),
        "--device-config", devicePath,
        "--state", join(dir, `state-${attempt}.json`),
      ],
      { stdio: "ignore" },
    );
    const deadline = Date.now() + 15000;
    while (Date.now() < deadline) {
      if (child.exitCode !== null) break; // port clash: try again
      try {
        const response = await fetch(`${url}/api/tour`);
        if (response.ok) {
          return {
            url,
            client: new ApiClient(url),
            stop: () => child.kill("SIGTERM"),
          };
        }
      } catch (error) {
        lastError = error;
      }
      await sleep(100);
    }
    child.kill("SIGTERM");
  }
  throw new Error(`backend did not start: ${lastError}`);
}

export function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

/** Fresh #app container, like a page load. */
export function freshRoot(): HTMLElement {
  document.body.innerHTML = '<main id="app"></main>';
  return document.getElementById("app") as HTMLElement;
}

export function fire(element: Element, type: string): void {
  element.dispatchEvent(new window.Event(type, { bubbles: true }));
}
