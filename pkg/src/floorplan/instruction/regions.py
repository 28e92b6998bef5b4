"""Compass regions: a 3x3 split of the enclosing box into equal thirds."""

from __future__ import annotations

from typing import Optional, Union

from ..boundary import BoundarySpec, decompose, enclosing_of_boxes
from ..geometry import BBox, FloorPlan, footprint
from .model import REGION_CELL, REGION_GRID, CompassRegion

Enclosure = Union[BoundarySpec, BBox, tuple]


def _enclosing_fp(enc: Enclosure) -> tuple[int, int, int, int]:
    if isinstance(enc, BoundarySpec):
        return footprint(enc.enclosing)
    if isinstance(enc, BBox):
        return footprint(enc)
    return tuple(enc)


def _third(offset: int, span: int) -> int:
    # half-open thirds: index k covers offsets [ceil(k*span/3), ceil((k+1)*span/3))
    return min(max(3 * offset // span, 0), 2)


def region_of(b: BBox, enc: Enclosure) -> CompassRegion:
    """Region cell containing the box center; centers outside clamp to the nearest cell."""
    x0, y0, x1, y1 = _enclosing_fp(enc)
    row = _third(b.y - y0, y1 - y0 + 1)
    col = _third(b.x - x0, x1 - x0 + 1)
    return REGION_GRID[row][col]


def region_cell(region: CompassRegion, enc: Enclosure) -> tuple[int, int, int, int]:
    """Inclusive pixel rectangle ``(x0, y0, x1, y1)`` of a region cell."""
    x0, y0, x1, y1 = _enclosing_fp(enc)
    row, col = REGION_CELL[region]

    def bounds(start: int, span: int, k: int) -> tuple[int, int]:
        lo = start + -(-k * span // 3)
        hi = start + -(-(k + 1) * span // 3) - 1
        return lo, hi

    cx0, cx1 = bounds(x0, x1 - x0 + 1, col)
    cy0, cy1 = bounds(y0, y1 - y0 + 1, row)
    return (cx0, cy0, cx1, cy1)


def plan_enclosure(fp: FloorPlan) -> Optional[BoundarySpec]:
    """Boundary spec of a plan, or an exterior-free spec around its rooms."""
    if fp.boundary is not None and fp.boundary.any():
        return decompose(fp.boundary)
    if not fp.rooms:
        return None
    return BoundarySpec(enclosing_of_boxes(r.bbox for r in fp.rooms))
