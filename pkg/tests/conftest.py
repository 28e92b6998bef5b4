from __future__ import annotations

import random

import pytest

from floorplan.geometry import BBox, FloorPlan, Room, RoomType


def random_valid_bbox(rng: random.Random) -> BBox:
    """Any box whose four values fit the token range (footprint may leave the grid)."""
    return BBox(rng.randint(0, 255), rng.randint(0, 255), rng.randint(1, 255), rng.randint(1, 255))


def random_sequence_plan(rng: random.Random, lo: int = 1, hi: int = 10) -> FloorPlan:
    types = list(RoomType)
    return FloorPlan(tuple(Room(rng.choice(types), random_valid_bbox(rng)) for _ in range(rng.randint(lo, hi))))


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240611)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
