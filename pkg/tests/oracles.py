"""Independent reference implementations used to cross-check the engine.

These deliberately take different routes from the production code:

- The command recognizer is the grammar regex handed to Python's regex
  engine, while production hand-rolls a tokenizer. Agreement between the
  two is asserted over a large fuzz corpus and over every codepoint.
- The grid oracle finds the containing cell by linear scan over row and
  column intervals (enumeration), while production computes indices in
  closed form. Both must land on identical cell centers.
"""

from __future__ import annotations

import math
import re

EARTH_RADIUS_KM = 6371.0088
COS_FLOOR = 0.01

# Reference recognizer for the SMS command grammar: keyword, verb,
# 1-100 char [a-z0-9] passphrase, single-whitespace-class separators,
# case-insensitive, anchored at both ends.
COMMAND_RE = re.compile(r"rpp\s+(lock|ring|locate|wipe)\s+([a-z0-9]{1,100})", re.IGNORECASE)


def reference_accepts(body: str) -> re.Match | None:
    return COMMAND_RE.fullmatch(body)


def quantize_by_scan(lat: float, lon: float, grid_km: float) -> tuple[float, float]:
    """Cell center via linear scan instead of closed-form floor arithmetic."""
    dphi = (grid_km / EARTH_RADIUS_KM) * (180.0 / math.pi)
    n_rows = math.ceil(180.0 / dphi)

    row = n_rows - 1  # poleward fallback mirrors the production clamp
    for i in range(n_rows):
        lo = -90.0 + i * dphi
        if lo <= lat < lo + dphi:
            row = i
            break
    row_lo = -90.0 + row * dphi
    row_hi = min(row_lo + dphi, 90.0)
    center_lat = min(-90.0 + (row + 0.5) * dphi, 90.0)

    if row_lo <= 0.0 <= row_hi:
        cos_widest = 1.0
    else:
        cos_widest = math.cos(math.radians(min(abs(row_lo), abs(row_hi))))
    dlam = dphi / max(cos_widest, COS_FLOOR)
    n_cols = math.ceil(360.0 / dlam)

    col = n_cols - 1
    for j in range(n_cols):
        lo = -180.0 + j * dlam
        if lo <= lon < lo + dlam:
            col = j
            break
    center_lon = -180.0 + (col + 0.5) * dlam
    if center_lon >= 180.0:
        center_lon -= 360.0
    return center_lat, center_lon


def haversine_km(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp = p2 - p1
    dl = math.radians(lon2 - lon1)
    a = math.sin(dp / 2.0) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(a)))
