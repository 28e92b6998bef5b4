"""Outline <-> box-set conversion.

An outline is encoded as the minimum enclosing box of the interior plus a
list of exterior boxes that exactly tile the non-interior cells inside it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import ndimage

from .geometry import (
    GRID_SIZE,
    BBox,
    GeometryError,
    bbox_from_footprint,
    clipped_footprint,
    empty_mask,
    footprint,
    mask_bbox,
)


class BoundaryError(GeometryError):
    pass


@dataclass(frozen=True)
class BoundarySpec:
    enclosing: BBox
    exterior: tuple[BBox, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "exterior", tuple(self.exterior))

    def problems(self, mask: Optional[np.ndarray] = None) -> list[str]:
        """Invariant violations, empty when the encoding is valid."""
        out = []
        if not self.enclosing.in_grid:
            out.append("enclosing box leaves the grid")
        ex0, ey0, ex1, ey1 = footprint(self.enclosing)
        fps = [footprint(b) for b in self.exterior]
        for i, (x0, y0, x1, y1) in enumerate(fps):
            if self.exterior[i].h < 1 or self.exterior[i].w < 1:
                out.append(f"exterior box {i} is empty")
            elif x0 < ex0 or y0 < ey0 or x1 > ex1 or y1 > ey1:
                out.append(f"exterior box {i} leaves the enclosing box")
        for i in range(len(fps)):
            for j in range(i + 1, len(fps)):
                if _overlap(fps[i], fps[j]):
                    out.append(f"exterior boxes {i} and {j} overlap")
        if mask is not None:
            for i, b in enumerate(self.exterior):
                fp = clipped_footprint(b)
                if fp is not None and mask[fp[1] : fp[3] + 1, fp[0] : fp[2] + 1].any():
                    out.append(f"exterior box {i} covers interior cells")
        return out

    @property
    def is_valid(self) -> bool:
        return not self.problems()


def _overlap(a: tuple[int, int, int, int], b: tuple[int, int, int, int]) -> bool:
    return a[0] <= b[2] and b[0] <= a[2] and a[1] <= b[3] and b[1] <= a[3]


def decompose(mask: np.ndarray) -> BoundarySpec:
    """Encode a mask as enclosing box + horizontal-strip exterior boxes.

    Rows inside the enclosing box are scanned top to bottom. Every maximal
    run of exterior cells not yet covered starts a box, which grows downward
    while the row below has exactly the same maximal run. Boxes come out
    ordered by (top row, left column).
    """
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise BoundaryError("cannot decompose an empty mask")
    x0, y0, x1, y1 = mask_bbox(mask)
    enclosing = bbox_from_footprint(x0, y0, x1, y1)
    outside = ~mask[y0 : y1 + 1, x0 : x1 + 1]
    runs = [_runs(row) for row in outside]
    taken = [set() for _ in runs]
    exterior = []
    for r, row_runs in enumerate(runs):
        for run in row_runs:
            if run in taken[r]:
                continue
            bottom = r
            while bottom + 1 < len(runs) and run in runs[bottom + 1]:
                bottom += 1
                taken[bottom].add(run)
            exterior.append(bbox_from_footprint(x0 + run[0], y0 + r, x0 + run[1], y0 + bottom))
    return BoundarySpec(enclosing, tuple(exterior))


def _runs(row: np.ndarray) -> list[tuple[int, int]]:
    """Inclusive (start, end) column pairs of maximal true runs."""
    padded = np.concatenate(([False], row, [False])).astype(np.int8)
    edges = np.flatnonzero(np.diff(padded))
    return [(int(s), int(e) - 1) for s, e in zip(edges[::2], edges[1::2])]


def reconstruct(bs: BoundarySpec, strict: bool = True) -> np.ndarray:
    """Interior mask: enclosing footprint minus the exterior footprints.

    In strict mode any invariant violation (overlap, box outside the
    enclosing box or the grid) raises; lenient mode clips to the grid and
    simply clears every exterior cell.
    """
    if strict:
        problems = bs.problems()
        if problems:
            raise BoundaryError("; ".join(problems))
    mask = empty_mask()
    fp = clipped_footprint(bs.enclosing)
    if fp is None:
        return mask
    mask[fp[1] : fp[3] + 1, fp[0] : fp[2] + 1] = True
    for b in bs.exterior:
        fp = clipped_footprint(b)
        if fp is not None:
            mask[fp[1] : fp[3] + 1, fp[0] : fp[2] + 1] = False
    return mask


def is_rectilinear_simple(mask: np.ndarray) -> bool:
    """True when the interior is nonempty, 4-connected and has no holes."""
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        return False
    _, n = ndimage.label(mask)
    if n != 1:
        return False
    # 8-connected background is the dual of 4-connected foreground.
    padded = np.pad(~mask, 1, constant_values=True)
    _, n_bg = ndimage.label(padded, structure=np.ones((3, 3), dtype=int))
    return n_bg == 1


def enclosing_of_boxes(boxes) -> BBox:
    """Minimum box around the grid-clipped footprints of ``boxes``."""
    fps = [fp for fp in (clipped_footprint(b) for b in boxes) if fp is not None]
    if not fps:
        raise BoundaryError("no in-grid boxes to enclose")
    x0 = min(f[0] for f in fps)
    y0 = min(f[1] for f in fps)
    x1 = max(f[2] for f in fps)
    y1 = max(f[3] for f in fps)
    x1 = min(x1, x0 + 254)
    y1 = min(y1, y0 + 254)
    return bbox_from_footprint(x0, y0, x1, y1)


def fit_to_token_range(mask: np.ndarray) -> tuple[np.ndarray, bool]:
    """Drop the far row/column of a mask whose extent spans all 256 pixels.

    Returns the (possibly copied) mask and whether anything was trimmed.
    """
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        return mask, False
    x0, y0, x1, y1 = mask_bbox(mask)
    trimmed = False
    if x1 - x0 + 1 >= GRID_SIZE or y1 - y0 + 1 >= GRID_SIZE:
        mask = mask.copy()
        if x1 - x0 + 1 >= GRID_SIZE:
            mask[:, x1] = False
        if y1 - y0 + 1 >= GRID_SIZE:
            mask[y1, :] = False
        trimmed = True
    return mask, trimmed
