from __future__ import annotations

import random

import numpy as np
import pytest

from floorplan.geometry import BBox, FloorPlan, Room, RoomType, footprint, make_plan, rect_mask
from floorplan.metrics import (
    PAINT_ORDER,
    adjacent,
    footprints_adjacent,
    iou,
    rasterize,
    shift_grid,
    shift_max_iou,
)

from .oracles import brute_adjacent, brute_iou, brute_shift, brute_shift_max


def random_grid(rng: random.Random, n: int = 16, types: int = 4) -> np.ndarray:
    labels = rng.sample(range(1, 9), types)
    g = np.zeros((n, n), dtype=np.uint8)
    for _ in range(rng.randint(0, 5)):
        x0, y0 = rng.randrange(n), rng.randrange(n)
        g[y0 : y0 + rng.randint(1, 8), x0 : x0 + rng.randint(1, 8)] = rng.choice(labels)
    return g


def test_paint_order():
    assert [t.token for t in PAINT_ORDER] == [
        "LivingRoom", "CommonRoom", "MasterRoom", "Balcony", "Bathroom", "Kitchen", "Storage", "DiningRoom",
    ]


def test_rasterize_empty():
    assert not rasterize(FloorPlan()).any()


def test_rasterize_balcony_pixels():
    g = rasterize(make_plan([(RoomType.BALCONY, BBox(87, 66, 18, 23))]))
    rows, cols = np.nonzero(g == RoomType.BALCONY.label)
    assert rows.size == 18 * 23 == int((g != 0).sum())
    assert (cols.min(), rows.min(), cols.max(), rows.max()) == (76, 57, 98, 74)


def test_rasterize_kitchen_wins_overlap_regardless_of_list_order():
    living = (RoomType.LIVING_ROOM, BBox(50, 50, 40, 40))
    kitchen = (RoomType.KITCHEN, BBox(70, 70, 20, 20))
    a = rasterize(make_plan([living, kitchen]))
    b = rasterize(make_plan([kitchen, living]))
    assert np.array_equal(a, b)
    assert a[65, 65] == RoomType.KITCHEN.label


def test_rasterize_clips_to_grid_and_optionally_boundary():
    g = rasterize(make_plan([(RoomType.STORAGE, BBox(0, 0, 4, 4))]))
    assert int((g != 0).sum()) == 4
    fp = FloorPlan((Room(RoomType.STORAGE, BBox(10, 10, 10, 10)),), rect_mask(0, 0, 9, 9))
    assert int((rasterize(fp) != 0).sum()) == 100
    assert int((rasterize(fp, clip_to_boundary=True) != 0).sum()) == 25


def test_iou_examples():
    g = rasterize(make_plan([(RoomType.KITCHEN, BBox(10, 10, 5, 5))]))
    assert iou(g, g).micro == iou(g, g).macro == 1.0
    gt = np.zeros((256, 256), np.uint8)
    pred = np.zeros_like(gt)
    gt[0:2, 0:2] = RoomType.KITCHEN.label
    pred[1:3, 1:3] = RoomType.KITCHEN.label
    s = iou(gt, pred)
    assert s.per_type[RoomType.KITCHEN] == (1, 7)
    assert s.micro == s.macro == pytest.approx(1 / 7)
    far = np.zeros_like(gt)
    far[100:102, 100:102] = RoomType.KITCHEN.label
    assert iou(gt, far).micro == iou(gt, far).macro == 0.0


def test_iou_macro_modes():
    gt = np.zeros((8, 8), np.uint8)
    gt[:4] = 1
    pred = gt.copy()
    pred[:2] = 2
    # type 1: I=16, U=32; type 2: I=0, U=16
    present = iou(gt, pred)
    assert present.macro == pytest.approx((0.5 + 0.0) / 2)
    assert iou(gt, pred, "all8").macro == pytest.approx((0.5 + 0.0 + 6) / 8)
    assert present.micro == pytest.approx(16 / 48)
    with pytest.raises(ValueError):
        iou(gt, pred, "weird")


def test_iou_errors():
    with pytest.raises(ValueError):
        iou(np.zeros((4, 4), np.uint8), np.zeros((5, 5), np.uint8))
    with pytest.raises(ValueError):
        iou(np.full((4, 4), 9, np.uint8), np.zeros((4, 4), np.uint8))


def test_iou_against_oracle_and_symmetry():
    rng = random.Random(5)
    for _ in range(100):
        a, b = random_grid(rng), random_grid(rng)
        s = iou(a, b)
        micro, macro = brute_iou(a.tolist(), b.tolist())
        assert abs(s.micro - micro) <= 1e-12 and abs(s.macro - macro) <= 1e-12
        t = iou(b, a)
        assert (s.micro, s.macro) == (t.micro, t.macro)
        assert 0 <= s.micro <= 1 and 0 <= s.macro <= 1


def test_single_type_micro_equals_macro():
    rng = random.Random(6)
    for _ in range(30):
        a = (random_grid(rng, types=1) > 0).astype(np.uint8) * 3
        b = (random_grid(rng, types=1) > 0).astype(np.uint8) * 3
        if a.any() or b.any():
            s = iou(a, b)
            assert s.micro == s.macro


def test_shift_grid_matches_oracle():
    rng = random.Random(4)
    g = random_grid(rng)
    for dx, dy in [(0, 0), (3, -2), (-5, 7), (16, 0), (-20, 3)]:
        assert shift_grid(g, dx, dy).tolist() == brute_shift(g.tolist(), dx, dy)


def test_shift_max_examples():
    gt = rasterize(make_plan([(RoomType.KITCHEN, BBox(100, 100, 30, 20)), (RoomType.BATHROOM, BBox(130, 90, 10, 10))]))
    pred = shift_grid(gt, 5, -3)
    s, shift = shift_max_iou(gt, pred, 8)
    assert shift == (-5, 3)
    assert s.micro == 1.0
    s0, shift0 = shift_max_iou(gt, pred, 0)
    assert shift0 == (0, 0)
    assert (s0.micro, s0.macro, s0.per_type) == (iou(gt, pred).micro, iou(gt, pred).macro, iou(gt, pred).per_type)


def test_shift_max_against_exhaustive_oracle():
    rng = random.Random(12)
    for _ in range(25):
        a, b = random_grid(rng), random_grid(rng)
        s, shift = shift_max_iou(a, b, 4)
        micro, macro, oshift = brute_shift_max(a.tolist(), b.tolist(), 4)
        assert shift == oshift
        assert abs(s.micro - micro) <= 1e-12 and abs(s.macro - macro) <= 1e-12
        assert s.micro >= iou(a, b).micro


def test_shift_max_prefers_small_shift_on_ties():
    gt = np.zeros((16, 16), np.uint8)
    pred = np.zeros_like(gt)
    pred[0, 0] = 1  # nothing overlaps any shift of gt: all candidates tie at 0
    gt[10, 10] = 2
    _, shift = shift_max_iou(gt, pred, 3)
    assert shift == (0, 0)


def test_shift_max_negative_window():
    with pytest.raises(ValueError):
        shift_max_iou(np.zeros((4, 4), np.uint8), np.zeros((4, 4), np.uint8), -1)


def test_adjacent_examples():
    a = BBox(10, 10, 10, 10)  # footprint (5,5,14,14)
    assert adjacent(a, BBox(20, 10, 10, 10))  # shares the x=15 edge
    assert not adjacent(a, BBox(35, 10, 10, 10))  # 10 px apart
    assert not adjacent(a, BBox(20, 20, 10, 10))  # corner touch only
    assert adjacent(a, BBox(12, 12, 4, 4))  # overlap


def test_adjacent_against_pixel_walk_oracle():
    rng = random.Random(21)
    for _ in range(400):
        fa = [rng.randint(0, 20), rng.randint(0, 20)]
        fa += [fa[0] + rng.randint(0, 6), fa[1] + rng.randint(0, 6)]
        fb = [rng.randint(0, 20), rng.randint(0, 20)]
        fb += [fb[0] + rng.randint(0, 6), fb[1] + rng.randint(0, 6)]
        gap = rng.randint(0, 3)
        assert footprints_adjacent(fa, fb, gap) == brute_adjacent(fa, fb, gap), (fa, fb, gap)
