"""Guided-tour content: ordered, read-only panels per topic.

Panels are data, not code - a JSON file of (topic, order, title, body,
illustration) records. Body text states the consequence of flipping the
setting, not just what the setting is. The tour never embeds controls;
users read, then configure on the real panels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from ..errors import NotFoundError, ValidationError

TOPICS = ("overview", "location", "rpp", "guest", "backup")


@dataclass(frozen=True)
class TourPanel:
    panel_id: str
    topic: str
    title: str
    body: str
    illustration_ref: str
    order: int

    def to_json(self) -> dict:
        return {
            "panel_id": self.panel_id,
            "topic": self.topic,
            "title": self.title,
            "body": self.body,
            "illustration_ref": self.illustration_ref,
            "order": self.order,
        }


def load_tour(path: str | None = None) -> list[TourPanel]:
    if path is None:
        text = resources.files("privdash.data").joinpath("tour.json").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"tour file is not valid JSON: {exc.msg} at offset {exc.pos}", field="$", code="malformed") from exc
    panels = []
    seen_orders: set[tuple[str, int]] = set()
    for i, entry in enumerate(raw):
        topic = entry.get("topic")
        if topic not in TOPICS:
            raise ValidationError(f"unknown tour topic {topic!r}", field=f"[{i}].topic", code="unknown_topic")
        order = int(entry.get("order", 0))
        if (topic, order) in seen_orders:
            raise ValidationError(f"duplicate order {order} within topic {topic!r}", field=f"[{i}].order", code="duplicate")
        seen_orders.add((topic, order))
        panels.append(
            TourPanel(
                panel_id=str(entry["panel_id"]),
                topic=topic,
                title=str(entry["title"]),
                body=str(entry["body"]),
                illustration_ref=str(entry.get("illustration_ref", "")),
                order=order,
            )
        )
    return panels


def get_tour(panels: list[TourPanel], topic: str | None = None) -> list[TourPanel]:
    """Panels for one topic, or all topics in canonical order."""
    if topic is not None:
        if topic not in TOPICS:
            raise NotFoundError(f"unknown tour topic {topic!r}")
        selected = [p for p in panels if p.topic == topic]
    else:
        selected = list(panels)
    return sorted(selected, key=lambda p: (TOPICS.index(p.topic), p.order))
