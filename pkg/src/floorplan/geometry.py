"""Core value types: room labels, integer boxes on the 256 grid, plans.

Coordinates follow the raster convention: row 0 is the top (north) edge and
column 0 the left (west) edge. A box is stored by its center and extent; the
footprint of an even-sized span puts the center ``floor(w / 2)`` pixels right
of the left edge, which keeps box <-> footprint a bijection.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

import numpy as np

GRID_SIZE = 256
TOKEN_MAX = 255


class GeometryError(ValueError):
    """Raised when coordinates violate a box or grid precondition."""


class RoomType(Enum):
    """The eight room semantics. The value is the raster label (0 = background)."""

    COMMON_ROOM = 1
    BATHROOM = 2
    BALCONY = 3
    LIVING_ROOM = 4
    MASTER_ROOM = 5
    KITCHEN = 6
    STORAGE = 7
    DINING_ROOM = 8

    @property
    def label(self) -> int:
        return self.value

    @property
    def display_name(self) -> str:
        return _DISPLAY_NAMES[self]

    @property
    def token(self) -> str:
        """CamelCase name used in target sequences and JSON files."""
        return _TOKENS[self]

    @classmethod
    def from_label(cls, label: int) -> "RoomType":
        try:
            return cls(int(label))
        except ValueError:
            raise GeometryError(f"unknown room label {label!r}") from None

    @classmethod
    def from_name(cls, name: str) -> "RoomType":
        """Look up a type by CamelCase, spaced or snake form, case-insensitively."""
        key = "".join(ch for ch in name.lower() if ch.isalpha())
        try:
            return _BY_KEY[key]
        except KeyError:
            raise GeometryError(f"unknown room type {name!r}") from None


_DISPLAY_NAMES = {
    RoomType.COMMON_ROOM: "common room",
    RoomType.BATHROOM: "bathroom",
    RoomType.BALCONY: "balcony",
    RoomType.LIVING_ROOM: "living room",
    RoomType.MASTER_ROOM: "master room",
    RoomType.KITCHEN: "kitchen",
    RoomType.STORAGE: "storage",
    RoomType.DINING_ROOM: "dining room",
}
_TOKENS = {t: "".join(part.capitalize() for part in n.split()) for t, n in _DISPLAY_NAMES.items()}
_BY_KEY = {tok.lower(): t for t, tok in _TOKENS.items()}


@dataclass(frozen=True)
class BBox:
    """Integer center/extent rectangle: ``x`` column, ``y`` row, ``h`` rows, ``w`` columns.

    Construction never rejects values, because decoded model output may be
    nonsensical; use :attr:`in_token_range` and :attr:`in_grid` to check.
    """

    x: int
    y: int
    h: int
    w: int

    def __post_init__(self) -> None:
        for name in ("x", "y", "h", "w"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise GeometryError(f"BBox.{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))

    @property
    def footprint(self) -> tuple[int, int, int, int]:
        return footprint(self)

    @property
    def area(self) -> int:
        return self.h * self.w

    @property
    def in_token_range(self) -> bool:
        return 0 <= self.x <= TOKEN_MAX and 0 <= self.y <= TOKEN_MAX and 1 <= self.h <= TOKEN_MAX and 1 <= self.w <= TOKEN_MAX

    @property
    def in_grid(self) -> bool:
        x0, y0, x1, y1 = footprint(self)
        return self.h >= 1 and self.w >= 1 and x0 >= 0 and y0 >= 0 and x1 < GRID_SIZE and y1 < GRID_SIZE

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.x, self.y, self.h, self.w)


def footprint(b: BBox) -> tuple[int, int, int, int]:
    """Inclusive pixel extent ``(x0, y0, x1, y1)``; may leave the grid for flagged boxes."""
    x0 = b.x - b.w // 2
    y0 = b.y - b.h // 2
    return (x0, y0, x0 + b.w - 1, y0 + b.h - 1)


def bbox_from_footprint(x0: int, y0: int, x1: int, y1: int) -> BBox:
    if not (0 <= x0 <= x1 < GRID_SIZE and 0 <= y0 <= y1 < GRID_SIZE):
        raise GeometryError(f"footprint ({x0}, {y0}, {x1}, {y1}) is inverted or off the grid")
    w = x1 - x0 + 1
    h = y1 - y0 + 1
    if w > TOKEN_MAX or h > TOKEN_MAX:
        raise GeometryError(f"footprint span {w}x{h} exceeds the single-token bound {TOKEN_MAX}")
    return BBox(x0 + w // 2, y0 + h // 2, h, w)


def clipped_footprint(b: BBox, size: int = GRID_SIZE) -> Optional[tuple[int, int, int, int]]:
    """Footprint intersected with the grid, or ``None`` when nothing is left."""
    x0, y0, x1, y1 = footprint(b)
    x0, y0 = max(x0, 0), max(y0, 0)
    x1, y1 = min(x1, size - 1), min(y1, size - 1)
    if x0 > x1 or y0 > y1:
        return None
    return (x0, y0, x1, y1)


def mask_bbox(mask: np.ndarray) -> tuple[int, int, int, int]:
    """Inclusive extent of the true cells of a 2D mask."""
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    if rows.size == 0:
        raise GeometryError("mask has no true cells")
    return (int(cols[0]), int(rows[0]), int(cols[-1]), int(rows[-1]))


@dataclass(frozen=True)
class Room:
    type: RoomType
    bbox: BBox


@dataclass(frozen=True, eq=False)
class FloorPlan:
    """Boundary mask plus the ordered room list.

    ``boundary`` is a 256x256 boolean array (true = interior) or ``None`` for
    plans recovered from a sequence, which carry no outline. Room order is the
    sequence order; it does not affect painting.
    """

    rooms: tuple[Room, ...] = ()
    boundary: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "rooms", tuple(self.rooms))
        if self.boundary is not None:
            mask = np.array(self.boundary, dtype=bool)
            if mask.shape != (GRID_SIZE, GRID_SIZE):
                raise GeometryError(f"boundary must be {GRID_SIZE}x{GRID_SIZE}, got {mask.shape}")
            mask.setflags(write=False)
            object.__setattr__(self, "boundary", mask)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FloorPlan):
            return NotImplemented
        if self.rooms != other.rooms:
            return False
        if self.boundary is None or other.boundary is None:
            return self.boundary is None and other.boundary is None
        return bool(np.array_equal(self.boundary, other.boundary))

    __hash__ = None  # type: ignore[assignment]

    def with_boundary(self, boundary: Optional[np.ndarray]) -> "FloorPlan":
        return FloorPlan(self.rooms, boundary)

    def rooms_of(self, room_type: RoomType) -> list[int]:
        return [i for i, r in enumerate(self.rooms) if r.type is room_type]


def make_plan(rooms: Iterable[tuple[RoomType, BBox]], boundary: Optional[np.ndarray] = None) -> FloorPlan:
    return FloorPlan(tuple(Room(t, b) for t, b in rooms), boundary)


def empty_mask() -> np.ndarray:
    return np.zeros((GRID_SIZE, GRID_SIZE), dtype=bool)


def rect_mask(x0: int, y0: int, x1: int, y1: int) -> np.ndarray:
    """Boolean grid with the inclusive rectangle set."""
    mask = empty_mask()
    mask[y0 : y1 + 1, x0 : x1 + 1] = True
    return mask
