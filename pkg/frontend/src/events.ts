/**
 * Live event feed. The poll loop hands batches in; rows are appended
 * only for records with a sequence number beyond the cursor, so the
 * rendered list is strictly increasing whatever the network does.
 */

import { EventRecord } from "./api.js";
import { el } from "./dom.js";

export class EventFeed {
  readonly root: HTMLElement;
  private tbody: HTMLElement;
  private cursor = 0;

  constructor() {
    this.tbody = el("tbody", { id: "event-rows" });
    this.root = el("div", { class: "event-feed" }, [
      el("h2", {}, ["Event feed"]),
      el("table", { class: "events" }, [
        el("thead", {}, [
          el("tr", {}, [el("th", {}, ["#"]), el("th", {}, ["kind"]), el("th", {}, ["detail"])]),
        ]),
        this.tbody,
      ]),
    ]);
  }

  get latestSeq(): number {
    return this.cursor;
  }

  /** Append new records; out-of-order or replayed records are dropped. */
  push(records: EventRecord[]): void {
    for (const record of records) {
      if (record.seq <= this.cursor) continue;
      this.cursor = record.seq;
      this.tbody.append(
        el("tr", { "data-seq": String(record.seq), "data-kind": record.kind }, [
          el("td", {}, [String(record.seq)]),
          el("td", {}, [record.kind]),
          el("td", {}, [JSON.stringify(record.detail)]),
        ]),
      );
    }
  }

  renderedSeqs(): number[] {
    return [...this.tbody.querySelectorAll("tr")].map((row) => Number(row.getAttribute("data-seq")));
  }
}
