"""Template-based artificial instructions.

Every room gets a location sentence, an area/aspect-ratio sentence, a sides
sentence and, when it touches other rooms, a relation sentence. Each
sentence is drawn from a small family of surface variants with a seeded RNG.
"""

from __future__ import annotations

import math
import random
from collections import Counter

from ..config import ScaleConfig
from ..geometry import FloorPlan, GeometryError
from ..metrics import DEFAULT_GAP, adjacent
from .model import ORDINALS, CompassRegion
from .regions import plan_enclosure, region_of

_DIRECTION_WORDS = {
    CompassRegion.N: "north",
    CompassRegion.S: "south",
    CompassRegion.E: "east",
    CompassRegion.W: "west",
    CompassRegion.NE: "northeast",
    CompassRegion.NW: "northwest",
    CompassRegion.SE: "southeast",
    CompassRegion.SW: "southwest",
}
_DIAGONAL = {CompassRegion.NE, CompassRegion.NW, CompassRegion.SE, CompassRegion.SW}

_LOCATION = (
    "{The} is located {where} of the house.",
    "There is {a} {where_loose} of the floor plan.",
    "You can find {the} {where_ern} of the apartment.",
)
_SIZE = (
    "It is about {area} sqft with an aspect ratio of {ratio}.",
    "{The} covers roughly {area} square feet, and its aspect ratio is {ratio}.",
    "With an area of {area} sqft, it has an aspect ratio of about {ratio}.",
)
_SIDES = (
    "It is {width} feet wide and {length} feet long.",
    "It measures {width} feet from east to west and {length} feet from north to south.",
    "Its width is about {width} feet and its length is about {length} feet.",
)
_RELATION = (
    "{The} is next to {targets}.",
    "It is adjacent to {targets}.",
    "{The} sits beside {targets}.",
)


def format_number(value: float) -> str:
    """At least three significant digits, trailing zeros dropped."""
    if value <= 0:
        raise ValueError("only positive quantities are rendered")
    decimals = min(max(0, 2 - math.floor(math.log10(value))), 6)
    text = f"{value:.{decimals}f}"
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text


def _names(fp: FloorPlan) -> list[str]:
    counts = Counter(r.type for r in fp.rooms)
    seen: Counter = Counter()
    out = []
    for room in fp.rooms:
        if counts[room.type] > 1:
            out.append(f"{ORDINALS[min(seen[room.type], len(ORDINALS) - 1)]} {room.type.display_name}")
        else:
            out.append(room.type.display_name)
        seen[room.type] += 1
    return out


def _article(noun: str) -> str:
    return ("an " if noun[0] in "aeiou" else "a ") + noun


def _where(region: CompassRegion) -> tuple[str, str, str]:
    if region is CompassRegion.CENTER:
        return "in the center", "in the middle", "at the central area"
    d = _DIRECTION_WORDS[region]
    if region in _DIAGONAL:
        return f"in the {d} corner", f"in the {d} part", f"at the {d}ern corner"
    return f"on the {d} side", f"in the {d} part", f"at the {d}ern side"


def _join(items: list[str]) -> str:
    if len(items) == 1:
        return items[0]
    return ", ".join(items[:-1]) + " and " + items[-1]


def _cap(s: str) -> str:
    return s[0].upper() + s[1:]


def generate_sections(
    fp: FloorPlan, scale: ScaleConfig = ScaleConfig(), seed: int = 0, gap: int = DEFAULT_GAP
) -> list[str]:
    """One paragraph per room, in plan order."""
    for room in fp.rooms:
        if not room.bbox.in_grid:
            raise GeometryError(f"{room.type.display_name} box {room.bbox} leaves the grid")
    enc = plan_enclosure(fp)
    rng = random.Random(seed)
    names = _names(fp)
    fpp = scale.feet_per_pixel
    sections = []
    for i, room in enumerate(fp.rooms):
        name = names[i]
        where, where_loose, where_ern = _where(region_of(room.bbox, enc))
        fields = {
            "The": f"The {name}",
            "the": f"the {name}",
            "a": _article(name),
            "where": where,
            "where_loose": where_loose,
            "where_ern": where_ern,
        }
        b = room.bbox
        long_side, short_side = max(b.h, b.w), min(b.h, b.w)
        fields["area"] = format_number(b.h * b.w * fpp * fpp)
        fields["ratio"] = format_number(long_side / short_side)
        fields["width"] = format_number(b.w * fpp)
        fields["length"] = format_number(b.h * fpp)
        neighbours = [f"the {names[j]}" for j, other in enumerate(fp.rooms) if j != i and adjacent(b, other.bbox, gap)]
        fields["targets"] = _join(neighbours) if neighbours else ""

        sentences = [
            rng.choice(_LOCATION).format(**fields),
            rng.choice(_SIZE).format(**fields),
            rng.choice(_SIDES).format(**fields),
        ]
        if neighbours:
            sentences.append(rng.choice(_RELATION).format(**fields))
        sections.append(" ".join(_cap(s) for s in sentences))
    return sections


def generate(fp: FloorPlan, scale: ScaleConfig = ScaleConfig(), seed: int = 0, gap: int = DEFAULT_GAP) -> str:
    return " ".join(generate_sections(fp, scale, seed, gap))

