/**
 * Dashboard shell: tab navigation, a status strip fed by the 1 s poll
 * loop, and one mount per panel. Every rendered value originates from
 * an API response; reloading the page rebuilds the identical view from
 * server state alone.
 */

import { ApiClient, DeviceStatus } from "./api.js";
import { el, replaceChildrenOf } from "./dom.js";
import { EventFeed } from "./events.js";
import { mountBackup } from "./backup.js";
import { mountGuest } from "./guest.js";
import { mountLocation } from "./location.js";
import { mountRpp } from "./rpp.js";
import { mountTour } from "./tour.js";

const TABS = ["tour", "location", "protection", "guest", "backup", "events"] as const;
export type TabName = (typeof TABS)[number];

export function renderStatusStrip(status: DeviceStatus): HTMLElement {
  const indicator = (id: string, on: boolean, label: string) =>
    el("span", { id, class: on ? "indicator on" : "indicator" }, [label]);
  return el("div", { class: "status-strip", id: "status-strip" }, [
    indicator("ind-lock", status.lock !== "Unlocked", `lock: ${status.lock}`),
    indicator("ind-ringer", status.ringer.ringing, status.ringer.ringing ? `ringing @${status.ringer.volume}` : "ringer off"),
    indicator("ind-guest", status.guest_session !== null,
      status.guest_session ? `guest: ${status.guest_session.profile_id}` : "owner"),
    indicator("ind-rpp", status.rpp.armed, status.rpp.armed ? `protection: ${status.rpp.phase}` : "protection off"),
    el("span", { class: "clock", id: "ind-clock" }, [`t=${status.clock}`]),
  ]);
}

export class Dashboard {
  readonly feed = new EventFeed();
  private statusHost = el("div", { class: "status-host" });
  private panels: Record<TabName, HTMLElement>;
  private refreshers: Partial<Record<TabName, () => Promise<void>>> = {};
  private pollTimer: ReturnType<typeof setInterval> | null = null;

  constructor(private root: HTMLElement, private client: ApiClient) {
    this.panels = Object.fromEntries(TABS.map((tab) => [tab, el("section", { class: "panel", id: `panel-${tab}` })])) as Record<
      TabName,
      HTMLElement
    >;
  }

  /** Build the static shell and do the first full render from API state. */
  async boot(): Promise<void> {
    const nav = el(
      "nav",
      { class: "tabs" },
      TABS.map((tab) =>
        el("button", { class: "tab", id: `tab-${tab}`, onclick: () => this.show(tab) }, [tab]),
      ),
    );
    this.root.append(el("h1", {}, ["Privacy dashboard"]), this.statusHost, nav, ...TABS.map((tab) => this.panels[tab]));

    const onChanged = () => void this.pollOnce();
    const tour = mountTour(this.panels.tour, this.client);
    this.refreshers.tour = () => tour.show(undefined);
    this.refreshers.location = mountLocation(this.panels.location, this.client).refresh;
    this.refreshers.protection = mountRpp(this.panels.protection, this.client, onChanged).refresh;
    this.refreshers.guest = mountGuest(this.panels.guest, this.client, onChanged).refresh;
    this.refreshers.backup = mountBackup(this.panels.backup, this.client, onChanged).refresh;
    this.panels.events.append(this.feed.root);

    await Promise.all(Object.values(this.refreshers).map((refresh) => refresh()));
    await this.pollOnce();
    this.show("tour");
  }

  show(tab: TabName): void {
    for (const name of TABS) {
      this.panels[name].style.display = name === tab ? "" : "none";
      const button = this.root.querySelector(`#tab-${name}`);
      button?.classList.toggle("active", name === tab);
    }
  }

  /** One poll tick: status strip + event feed. The server is authoritative. */
  async pollOnce(): Promise<void> {
    const [status, events] = await Promise.all([
      this.client.getStatus(),
      this.client.getEvents(this.feed.latestSeq),
    ]);
    replaceChildrenOf(this.statusHost, [renderStatusStrip(status)]);
    this.feed.push(events.events);
  }

  startPolling(intervalMs = 1000): void {
    if (this.pollTimer !== null) return;
    this.pollTimer = setInterval(() => void this.pollOnce().catch(() => undefined), intervalMs);
  }

  stopPolling(): void {
    if (this.pollTimer !== null) clearInterval(this.pollTimer);
    this.pollTimer = null;
  }
}

/** Browser entry point. */
export async function start(): Promise<Dashboard> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");
  const dashboard = new Dashboard(root, new ApiClient(""));
  await dashboard.boot();
  dashboard.startPolling();
  return dashboard;
}

declare global {
  interface Window {
    privdashAutostart?: boolean;
  }
}

// The page opts in explicitly (index.html sets the flag); importing this
// module from tests must not boot anything.
if (typeof window !== "undefined" && window.privdashAutostart === true) {
  void start();
}
