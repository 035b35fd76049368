/**
 * Guided tour: read-only panels per topic, re-enterable from the topic
 * strip. No controls are embedded - users read here, configure on the
 * real panels.
 */

import { ApiClient, TourPanel } from "./api.js";
import { el, replaceChildrenOf } from "./dom.js";

export const TOPICS = ["overview", "location", "rpp", "guest", "backup"] as const;

export function renderTourPanels(panels: TourPanel[]): HTMLElement {
  return el(
    "div",
    { class: "tour-panels" },
    panels.map((panel) =>
      el("article", { class: "tour-panel", "data-panel-id": panel.panel_id, "data-topic": panel.topic }, [
        el("div", { class: "tour-illustration", "data-ref": panel.illustration_ref }, [
          panel.illustration_ref,
        ]),
        el("h3", {}, [`${panel.order}. ${panel.title}`]),
        el("p", {}, [panel.body]),
      ]),
    ),
  );
}

export function mountTour(root: HTMLElement, client: ApiClient): { show: (topic?: string) => Promise<void> } {
  const strip = el(
    "nav",
    { class: "tour-topics" },
    TOPICS.map((topic) =>
      el("button", { class: "tour-topic", "data-topic": topic, onclick: () => void show(topic) }, [topic]),
    ),
  );
  const body = el("div", { class: "tour-body" });
  root.append(strip, body);

  async function show(topic?: string): Promise<void> {
    const { panels } = await client.getTour(topic);
    replaceChildrenOf(body, [renderTourPanels(panels)]);
    for (const button of strip.querySelectorAll<HTMLButtonElement>(".tour-topic")) {
      button.classList.toggle("active", button.dataset.topic === topic);
    }
  }
  return { show };
}
