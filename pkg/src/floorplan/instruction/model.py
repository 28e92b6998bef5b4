"""Structured constraint records extracted from (or rendered into) instructions."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional

from ..geometry import RoomType

ORDINALS = ("first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth", "ninth", "tenth")


class CompassRegion(str, Enum):
    N = "N"
    NE = "NE"
    E = "E"
    SE = "SE"
    S = "S"
    SW = "SW"
    W = "W"
    NW = "NW"
    CENTER = "Center"


# rows top to bottom, columns west to east
REGION_GRID = (
    (CompassRegion.NW, CompassRegion.N, CompassRegion.NE),
    (CompassRegion.W, CompassRegion.CENTER, CompassRegion.E),
    (CompassRegion.SW, CompassRegion.S, CompassRegion.SE),
)
REGION_CELL = {region: (row, col) for row, line in enumerate(REGION_GRID) for col, region in enumerate(line)}


class RelationKind(str, Enum):
    NEXT_TO = "NextTo"
    BETWEEN = "Between"
    OPPOSITE = "Opposite"
    INSIDE = "Inside"


@dataclass(frozen=True)
class RoomRef:
    room_type: RoomType
    instance_tag: Optional[str] = None

    def to_json(self) -> dict[str, Any]:
        return {"room_type": self.room_type.token, "instance_tag": self.instance_tag}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "RoomRef":
        return cls(RoomType.from_name(data["room_type"]), data.get("instance_tag"))


@dataclass(frozen=True)
class Relation:
    kind: RelationKind
    targets: tuple[RoomRef, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", tuple(self.targets))
        expected = 2 if self.kind is RelationKind.BETWEEN else 1
        if len(self.targets) != expected:
            raise ValueError(f"{self.kind.value} takes {expected} target(s), got {len(self.targets)}")

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind.value, "targets": [t.to_json() for t in self.targets]}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "Relation":
        return cls(RelationKind(data["kind"]), tuple(RoomRef.from_json(t) for t in data["targets"]))


_POSITIVE = ("area_sqft", "aspect_ratio", "width_ft", "length_ft")


@dataclass
class RoomConstraint:
    """Requirements for one room.

    ``aspect_ratio`` is width over height; generated text always states the
    value >= 1 and leaves orientation to ``width_ft``/``length_ft``, where
    width runs east-west and length north-south.
    """

    room_type: RoomType
    instance_tag: Optional[str] = None
    region: Optional[CompassRegion] = None
    area_sqft: Optional[float] = None
    aspect_ratio: Optional[float] = None
    width_ft: Optional[float] = None
    length_ft: Optional[float] = None
    relations: list[Relation] = field(default_factory=list)

    def __post_init__(self) -> None:
        for name in _POSITIVE:
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ValueError(f"{name} must be positive, got {value!r}")

    @property
    def ref(self) -> RoomRef:
        return RoomRef(self.room_type, self.instance_tag)

    def to_json(self) -> dict[str, Any]:
        return {
            "room_type": self.room_type.token,
            "instance_tag": self.instance_tag,
            "region": self.region.value if self.region else None,
            "area_sqft": self.area_sqft,
            "aspect_ratio": self.aspect_ratio,
            "width_ft": self.width_ft,
            "length_ft": self.length_ft,
            "relations": [r.to_json() for r in self.relations],
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "RoomConstraint":
        region = data.get("region")
        return cls(
            room_type=RoomType.from_name(data["room_type"]),
            instance_tag=data.get("instance_tag"),
            region=CompassRegion(region) if region else None,
            area_sqft=data.get("area_sqft"),
            aspect_ratio=data.get("aspect_ratio"),
            width_ft=data.get("width_ft"),
            length_ft=data.get("length_ft"),
            relations=[Relation.from_json(r) for r in data.get("relations", [])],
        )


def constraints_to_json(cs: list[RoomConstraint]) -> list[dict[str, Any]]:
    return [c.to_json() for c in cs]


def constraints_from_json(data) -> list[RoomConstraint]:
    """Accept a list of constraint objects, ``{"constraints": [...]}``, or JSON text of either."""
    if isinstance(data, str):
        data = json.loads(data)
    if isinstance(data, dict):
        data = data.get("constraints", [])
    return [RoomConstraint.from_json(item) for item in data]


def ordinal_index(tag: Optional[str]) -> Optional[int]:
    if tag is None:
        return None
    try:
        return ORDINALS.index(tag)
    except ValueError:
        return None
