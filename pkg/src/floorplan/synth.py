"""Random ground-truth plans and masks for self-checks and demo corpora.

Plans are guillotine tilings of a rectangular or L-shaped outline, so rooms
touch their neighbours and cover the whole interior, as in real layouts.
"""

from __future__ import annotations

import random
from typing import Optional

import numpy as np

from .geometry import GRID_SIZE, FloorPlan, Room, RoomType, bbox_from_footprint, empty_mask

Rect = tuple[int, int, int, int]  # inclusive x0, y0, x1, y1

_POOL = [
    RoomType.MASTER_ROOM,
    RoomType.COMMON_ROOM,
    RoomType.KITCHEN,
    RoomType.BATHROOM,
    RoomType.COMMON_ROOM,
    RoomType.BALCONY,
    RoomType.BATHROOM,
    RoomType.STORAGE,
    RoomType.DINING_ROOM,
]
MIN_SIDE = 14


def _area(r: Rect) -> int:
    return (r[2] - r[0] + 1) * (r[3] - r[1] + 1)


def outline(rng: random.Random, shape: str = "rect") -> list[Rect]:
    """Interior as a list of disjoint rectangles (one for ``rect``, two for ``L``)."""
    w = rng.randint(140, 230)
    h = rng.randint(140, 230)
    x0 = rng.randint(0, GRID_SIZE - 1 - w)
    y0 = rng.randint(0, GRID_SIZE - 1 - h)
    x1, y1 = x0 + w - 1, y0 + h - 1
    if shape == "rect":
        return [(x0, y0, x1, y1)]
    if shape != "L":
        raise ValueError(f"unknown outline shape {shape!r}")
    nw = int(w * rng.uniform(0.3, 0.5))
    nh = int(h * rng.uniform(0.3, 0.5))
    right = rng.random() < 0.5
    top = rng.random() < 0.5
    # the notch is removed from one corner; the rest splits into a full band plus a stub
    if top:
        band = (x0, y0 + nh, x1, y1)
        stub = (x0, y0, x1 - nw, y0 + nh - 1) if right else (x0 + nw, y0, x1, y0 + nh - 1)
    else:
        band = (x0, y0, x1, y1 - nh)
        stub = (x0, y1 - nh + 1, x1 - nw, y1) if right else (x0 + nw, y1 - nh + 1, x1, y1)
    return [band, stub]


def _split(r: Rect, rng: random.Random) -> Optional[tuple[Rect, Rect]]:
    x0, y0, x1, y1 = r
    w, h = x1 - x0 + 1, y1 - y0 + 1
    vertical = w >= h
    span = w if vertical else h
    if span < 2 * MIN_SIDE:
        vertical = not vertical
        span = w if vertical else h
        if span < 2 * MIN_SIDE:
            return None
    cut = int(span * rng.uniform(0.35, 0.65))
    cut = min(max(cut, MIN_SIDE), span - MIN_SIDE)
    if vertical:
        return (x0, y0, x0 + cut - 1, y1), (x0 + cut, y0, x1, y1)
    return (x0, y0, x1, y0 + cut - 1), (x0, y0 + cut, x1, y1)


def random_plan(rng: random.Random, n_rooms: int, shape: str = "rect") -> FloorPlan:
    if not 1 <= n_rooms <= len(_POOL) + 1:
        raise ValueError(f"n_rooms must be in 1..{len(_POOL) + 1}")
    pieces = outline(rng, shape)
    mask = empty_mask()
    for x0, y0, x1, y1 in pieces:
        mask[y0 : y1 + 1, x0 : x1 + 1] = True
    while len(pieces) < n_rooms:
        pieces.sort(key=_area, reverse=True)
        for i, piece in enumerate(pieces):
            halves = _split(piece, rng)
            if halves is not None:
                pieces[i : i + 1] = list(halves)
                break
        else:
            break
    while len(pieces) > n_rooms:
        # an L outline starts with two pieces; fold the stub into one room by dropping the smallest
        pieces.sort(key=_area, reverse=True)
        pieces.pop()
    pieces.sort(key=_area, reverse=True)
    types = [RoomType.LIVING_ROOM] + _POOL[: len(pieces) - 1]
    head, tail = types[:3], types[3:]
    rng.shuffle(tail)
    types = head + tail
    rooms = [Room(t, bbox_from_footprint(*p)) for t, p in zip(types, pieces)]
    rng.shuffle(rooms)
    return FloorPlan(tuple(rooms), mask)


def random_rect_union_mask(rng: random.Random, max_rects: int = 6, limit: int = GRID_SIZE - 1) -> np.ndarray:
    """Union of 1..max_rects random axis-aligned rectangles whose extent stays below ``limit`` pixels."""
    mask = empty_mask()
    for _ in range(rng.randint(1, max_rects)):
        x0 = rng.randint(0, limit - 1)
        y0 = rng.randint(0, limit - 1)
        x1 = rng.randint(x0, min(limit - 1, x0 + rng.randint(0, 120)))
        y1 = rng.randint(y0, min(limit - 1, y0 + rng.randint(0, 120)))
        mask[y0 : y1 + 1, x0 : x1 + 1] = True
    return mask
