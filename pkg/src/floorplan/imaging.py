"""Label-map PNG files with a fixed indexed palette.

Pixel values are label indices: 0 is outside the plan, 1..8 follow
``RoomType.label`` and 9 marks interior pixels no room covers (walls,
corridors). Files are written as 8-bit palette PNGs so any image viewer shows
colors while the stored index stays exact.
"""

from __future__ import annotations

from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image

from .geometry import GRID_SIZE, FloorPlan, RoomType
from .metrics import rasterize

UNASSIGNED = 9
N_LABELS = 10

PALETTE: dict[int, tuple[int, int, int]] = {
    0: (255, 255, 255),
    RoomType.COMMON_ROOM.label: (238, 232, 170),
    RoomType.BATHROOM.label: (145, 190, 235),
    RoomType.BALCONY.label: (150, 205, 150),
    RoomType.LIVING_ROOM.label: (240, 170, 140),
    RoomType.MASTER_ROOM.label: (215, 160, 215),
    RoomType.KITCHEN.label: (250, 205, 90),
    RoomType.STORAGE.label: (170, 170, 170),
    RoomType.DINING_ROOM.label: (200, 130, 110),
    UNASSIGNED: (90, 90, 90),
}


class LabelMapError(ValueError):
    pass


def _flat_palette() -> list[int]:
    flat = []
    for i in range(N_LABELS):
        flat.extend(PALETTE[i])
    return flat


def label_image(fp: FloorPlan) -> np.ndarray:
    """Label map of a plan: rooms painted in fixed order, clipped to the outline."""
    grid = rasterize(fp, clip_to_boundary=fp.boundary is not None)
    if fp.boundary is not None:
        grid[(grid == 0) & fp.boundary] = UNASSIGNED
    return grid


def save_label_png(grid: np.ndarray, path: Union[str, Path]) -> None:
    grid = np.asarray(grid)
    if grid.ndim != 2 or grid.size and int(grid.max()) >= N_LABELS:
        raise LabelMapError(f"label grid must be 2-D with values below {N_LABELS}")
    img = Image.fromarray(grid.astype(np.uint8), mode="P")
    img.putpalette(_flat_palette())
    img.save(path, format="PNG", optimize=False)


def load_label_png(path: Union[str, Path], size: int = GRID_SIZE) -> np.ndarray:
    """Read label indices back. Greyscale images are read as raw indices."""
    with Image.open(path) as img:
        if img.mode not in ("P", "L"):
            raise LabelMapError(f"{path}: expected an indexed or greyscale PNG, got mode {img.mode}")
        grid = np.array(img, dtype=np.uint8)
    if grid.shape != (size, size):
        raise LabelMapError(f"{path}: expected {size}x{size} pixels, got {grid.shape[1]}x{grid.shape[0]}")
    bad = np.unique(grid[grid >= N_LABELS])
    if bad.size:
        raise LabelMapError(f"{path}: unknown label value {int(bad[0])}")
    return grid


def render_png(fp: FloorPlan, path: Union[str, Path], clip_to_boundary: bool = False) -> None:
    """Color image of a plan for viewing."""
    grid = rasterize(fp, clip_to_boundary=clip_to_boundary)
    if fp.boundary is not None:
        grid[(grid == 0) & fp.boundary] = UNASSIGNED
    save_label_png(grid, path)
