"""Rasterization, per-type IoU, shift-maximized IoU and box adjacency."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from .geometry import GRID_SIZE, BBox, FloorPlan, RoomType, clipped_footprint, footprint

# Descending total area over the upstream corpus; later types paint over earlier ones.
PAINT_ORDER = (
    RoomType.LIVING_ROOM,
    RoomType.COMMON_ROOM,
    RoomType.MASTER_ROOM,
    RoomType.BALCONY,
    RoomType.BATHROOM,
    RoomType.KITCHEN,
    RoomType.STORAGE,
    RoomType.DINING_ROOM,
)
_PAINT_RANK = {t: i for i, t in enumerate(PAINT_ORDER)}

DEFAULT_GAP = 2
DEFAULT_MAX_SHIFT = 32
MACRO_MODES = ("present", "all8")


def rasterize(fp: FloorPlan, clip_to_boundary: bool = False, size: int = GRID_SIZE) -> np.ndarray:
    grid = np.zeros((size, size), dtype=np.uint8)
    # sorted() is stable, so equal types keep plan-list order
    for room in sorted(fp.rooms, key=lambda r: _PAINT_RANK[r.type]):
        box = clipped_footprint(room.bbox, size)
        if box is not None:
            x0, y0, x1, y1 = box
            grid[y0 : y1 + 1, x0 : x1 + 1] = room.type.label
    if clip_to_boundary and fp.boundary is not None:
        grid[~fp.boundary] = 0
    return grid


@dataclass
class IoUScores:
    micro: float
    macro: float
    per_type: dict[RoomType, tuple[int, int]] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "micro": self.micro,
            "macro": self.macro,
            "per_type": {t.token: {"intersection": i, "union": u} for t, (i, u) in self.per_type.items()},
        }


def _counts_to_scores(inter: np.ndarray, union: np.ndarray, macro_mode: str) -> IoUScores:
    """``inter``/``union`` are length-9 label-indexed integer arrays."""
    if macro_mode not in MACRO_MODES:
        raise ValueError(f"macro_mode must be one of {MACRO_MODES}")
    per_type = {}
    ratios = []
    for t in RoomType:
        i, u = int(inter[t.label]), int(union[t.label])
        if u > 0:
            per_type[t] = (i, u)
            ratios.append(i / u)
        elif macro_mode == "all8":
            ratios.append(1.0)
    total_u = sum(u for _, u in per_type.values())
    if total_u == 0:
        # both rasters empty: identical, nothing to penalize
        return IoUScores(1.0, 1.0, per_type)
    micro = sum(i for i, _ in per_type.values()) / total_u
    return IoUScores(micro, sum(ratios) / len(ratios), per_type)


def _label_counts(grid: np.ndarray) -> np.ndarray:
    return np.bincount(grid.ravel(), minlength=9)[:9].astype(np.int64)


def iou(gt: np.ndarray, pred: np.ndarray, macro_mode: str = "present") -> IoUScores:
    gt = np.asarray(gt)
    pred = np.asarray(pred)
    if gt.shape != pred.shape:
        raise ValueError(f"grid shapes differ: {gt.shape} vs {pred.shape}")
    g = gt.ravel().astype(np.int64)
    p = pred.ravel().astype(np.int64)
    if g.size and (g.max() > 8 or p.max() > 8 or g.min() < 0 or p.min() < 0):
        raise ValueError("grids must hold labels 0..8")
    inter = np.bincount(g[g == p], minlength=9)[:9]
    union = _label_counts(gt) + _label_counts(pred) - inter
    return _counts_to_scores(inter, union, macro_mode)


def shift_grid(grid: np.ndarray, dx: int, dy: int) -> np.ndarray:
    """Translate by (dx, dy); pixels leaving the frame drop, vacated ones become 0."""
    out = np.zeros_like(grid)
    h, w = grid.shape
    if abs(dx) >= w or abs(dy) >= h:
        return out
    out[max(dy, 0) : h + min(dy, 0), max(dx, 0) : w + min(dx, 0)] = grid[
        max(-dy, 0) : h + min(-dy, 0), max(-dx, 0) : w + min(-dx, 0)
    ]
    return out


def shift_max_iou(
    gt: np.ndarray,
    pred: np.ndarray,
    max_shift: int = DEFAULT_MAX_SHIFT,
    macro_mode: str = "present",
) -> tuple[IoUScores, tuple[int, int]]:
    """Best micro IoU over integer translations of ``pred`` within the window.

    Ties go to the smaller ``|dx| + |dy|``, then to the lexicographically
    smaller ``(dx, dy)``. All window candidates are scored at once: per-type
    intersections come from FFT cross-correlation, and the number of
    predicted pixels still in frame from an integral image.
    """
    if max_shift < 0:
        raise ValueError("max_shift must be >= 0")
    gt = np.asarray(gt)
    pred = np.asarray(pred)
    if gt.shape != pred.shape:
        raise ValueError(f"grid shapes differ: {gt.shape} vs {pred.shape}")
    h, w = gt.shape
    sy = min(max_shift, h - 1)
    sx = min(max_shift, w - 1)
    dys = np.arange(-sy, sy + 1)
    dxs = np.arange(-sx, sx + 1)

    inter_sum = np.zeros((dys.size, dxs.size), dtype=np.int64)
    union_sum = np.zeros_like(inter_sum)
    gt_counts = _label_counts(gt)
    for t in RoomType:
        g = gt == t.label
        p = pred == t.label
        if not g.any() and not p.any():
            continue
        if g.any() and p.any():
            corr = fftconvolve(g.astype(np.float64), p[::-1, ::-1].astype(np.float64), mode="full")
            inter = np.rint(corr[np.ix_(dys + h - 1, dxs + w - 1)]).astype(np.int64)
        else:
            inter = np.zeros_like(inter_sum)
        kept = _kept_counts(p, dys, dxs)
        inter_sum += inter
        union_sum += gt_counts[t.label] + kept - inter

    with np.errstate(invalid="ignore", divide="ignore"):
        micro = np.where(union_sum > 0, inter_sum / np.maximum(union_sum, 1), 1.0)
    best = None
    for iy, dy in enumerate(dys):
        for ix, dx in enumerate(dxs):
            key = (-micro[iy, ix], abs(dx) + abs(dy), dx, dy)
            if best is None or key < best:
                best = key
    dx, dy = int(best[2]), int(best[3])
    return iou(gt, shift_grid(pred, dx, dy), macro_mode), (dx, dy)


def _kept_counts(p: np.ndarray, dys: np.ndarray, dxs: np.ndarray) -> np.ndarray:
    """Pixels of ``p`` that stay in frame for every (dy, dx) shift."""
    h, w = p.shape
    sat = np.zeros((h + 1, w + 1), dtype=np.int64)
    sat[1:, 1:] = p.cumsum(0).cumsum(1)
    r0 = np.maximum(-dys, 0)
    r1 = h - np.maximum(dys, 0)
    c0 = np.maximum(-dxs, 0)
    c1 = w - np.maximum(dxs, 0)
    R0, C0 = np.meshgrid(r0, c0, indexing="ij")
    R1, C1 = np.meshgrid(r1, c1, indexing="ij")
    return sat[R1, C1] - sat[R0, C1] - sat[R1, C0] + sat[R0, C0]


def adjacent(a: BBox, b: BBox, gap: int = DEFAULT_GAP) -> bool:
    """True when the boxes overlap, or are at most ``gap`` pixels apart along
    one axis while sharing at least one pixel of extent along the other."""
    if gap < 0:
        raise ValueError("gap must be >= 0")
    return footprints_adjacent(footprint(a), footprint(b), gap)


def footprints_adjacent(fa, fb, gap: int = DEFAULT_GAP) -> bool:
    x_sep = max(fa[0], fb[0]) - min(fa[2], fb[2]) - 1  # negative = shared columns
    y_sep = max(fa[1], fb[1]) - min(fa[3], fb[3]) - 1
    if x_sep < 0 and y_sep < 0:
        return True
    return (x_sep < 0 and y_sep <= gap) or (y_sep < 0 and x_sep <= gap)
