"""Pattern tables for the rule-based instruction parser.

All patterns run on lowercased text.
"""

from __future__ import annotations

import re

from ..geometry import RoomType
from .model import ORDINALS, CompassRegion, RelationKind

_ROOM_WORDS = [
    (RoomType.MASTER_ROOM, r"master\s+bed\s?rooms?|master\s+rooms?|master\s+suites?|main\s+bed\s?rooms?"),
    (RoomType.LIVING_ROOM, r"living\s+rooms?|living\s+areas?|lounges?|sitting\s+rooms?|family\s+rooms?"),
    (RoomType.DINING_ROOM, r"dining\s+rooms?|dining\s+areas?"),
    (RoomType.COMMON_ROOM, r"common\s+rooms?|bed\s?rooms?|guest\s+rooms?|kids?\s+rooms?|children'?s\s+rooms?|study\s+rooms?"),
    (RoomType.BATHROOM, r"bath\s?rooms?|wash\s?rooms?|rest\s?rooms?|toilets?"),
    (RoomType.KITCHEN, r"kitchens?"),
    (RoomType.STORAGE, r"storage\s+rooms?|store\s?rooms?|storages?"),
    (RoomType.BALCONY, r"balcon(?:y|ies)|terraces?|verandas?|verandahs?"),
]

_ORDINAL_DIGITS = {"1st": 0, "2nd": 1, "3rd": 2, "4th": 3, "5th": 4, "6th": 5, "7th": 6, "8th": 7, "9th": 8, "10th": 9}
_ORDINAL_WORDS = "|".join(list(ORDINALS) + list(_ORDINAL_DIGITS) + ["another", "other"])

MENTION_RE = re.compile(
    r"\b(?:(?P<ord>" + _ORDINAL_WORDS + r")\s+)?(?:"
    + "|".join(f"(?P<g{i}>{pat})" for i, (_, pat) in enumerate(_ROOM_WORDS))
    + r")\b"
)
MENTION_TYPES = {f"g{i}": t for i, (t, _) in enumerate(_ROOM_WORDS)}


def normalize_ordinal(word: str | None) -> str | None:
    """Map ``'2nd'`` to ``'second'``; ``another``/``other`` pass through."""
    if word is None:
        return None
    if word in _ORDINAL_DIGITS:
        return ORDINALS[_ORDINAL_DIGITS[word]]
    return word


PRONOUN_START_RE = re.compile(r"^\W*(?:it|its|it's|this\s+room|the\s+room|this\s+space|that\s+room|this\s+area)\b")

COMPASS_RE = re.compile(
    r"\b(?:(?P<d1>north|south)[\s-]?(?P<d2>east|west)(?:ern)?|(?P<c>north|south|east|west)(?:ern)?|(?P<mid>cent(?:er|re|ral)|middle))\b"
)
# opposite-direction pairs describe an axis, never a location
AXIS_RE = re.compile(r"\b(?:north\W+(?:to\W+)?south|south\W+(?:to\W+)?north|east\W+(?:to\W+)?west|west\W+(?:to\W+)?east)\b")
RELATIVE_TAIL_RE = re.compile(
    r"\s*(?:side|corner|part|end|area|section|portion|wing)?\s*of\s+(?:the\s+)?(?:"
    + "|".join(pat for _, pat in _ROOM_WORDS)
    + r")\b"
)

_CARDINAL = {"north": CompassRegion.N, "south": CompassRegion.S, "east": CompassRegion.E, "west": CompassRegion.W}


def compass_region(m: re.Match) -> CompassRegion:
    if m.group("d1"):
        return CompassRegion(m.group("d1")[0].upper() + m.group("d2")[0].upper())
    if m.group("c"):
        return _CARDINAL[m.group("c")]
    return CompassRegion.CENTER


NUM = r"(\d+(?:\.\d+)?)"
APPROX = r"(?:(?:about|around|approximately|roughly|nearly|almost|approx\.?|some|close\s+to|~)\s*)?"
FEET = r"(?:feet|foot|ft\.?|')"
SQ_METERS_TO_SQFT = 10.7639

AREA_RE = re.compile(NUM + r"\s*(?:sq\.?\s*(?:ft|feet)\.?|sqft|square\s+(?:feet|foot|ft)|ft2|ft\^2|ft²)")
AREA_M2_RE = re.compile(NUM + r"\s*(?:sq\.?\s*m\b|square\s+met(?:er|re)s?|m2\b|m²)")
RATIO_RE = re.compile(
    r"aspect\s+ratio\s*(?:of|is|=|:|at|around|about)?\s*(?:is\s+)?" + APPROX + NUM + r"(?:\s*(?::|to|/)\s*" + NUM + r")?"
)
WIDTH_RES = [
    re.compile(NUM + r"\s*" + FEET + r"\s+(?:wide|in\s+width|across)\b"),
    re.compile(r"\bwidth\s+(?:of\s+|is\s+|:\s*)?" + APPROX + NUM + r"\s*" + FEET),
    re.compile(NUM + r"\s*" + FEET + r"\s+from\s+(?:east\s+to\s+west|west\s+to\s+east)"),
]
LENGTH_RES = [
    re.compile(NUM + r"\s*" + FEET + r"\s+(?:long|in\s+length|deep|in\s+depth)\b"),
    re.compile(r"\blength\s+(?:of\s+|is\s+|:\s*)?" + APPROX + NUM + r"\s*" + FEET),
    re.compile(NUM + r"\s*" + FEET + r"\s+from\s+(?:north\s+to\s+south|south\s+to\s+north)"),
]
DIMS_RE = re.compile(NUM + r"\s*" + FEET + r"?\s*(?:by|x|×)\s*" + NUM + r"\s*" + FEET)

RELATION_RES = [
    (
        RelationKind.NEXT_TO,
        re.compile(
            r"\b(?:next\s+to|adjacent\s+to|beside|besides|alongside|adjoin(?:s|ing)?|connected\s+to|"
            r"connects\s+to|close\s+to|near|neighbou?ring|border(?:s|ing)?|attached\s+to)\b"
        ),
    ),
    (RelationKind.BETWEEN, re.compile(r"\bbetween\b")),
    (RelationKind.OPPOSITE, re.compile(r"\b(?:opposite(?:\s+to|\s+of)?|across\s+from|facing)\b")),
    (RelationKind.INSIDE, re.compile(r"\b(?:inside|within|enclosed\s+(?:by|in))\b")),
]

SENTENCE_SPLIT_RE = re.compile(r"(?<=[.!?])(?:\s+|$)")
