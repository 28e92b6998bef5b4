"""Verify a plan against parsed constraints.

Constraints are matched one-to-one to rooms of the same type by a minimum
violation assignment; relations are then evaluated between matched rooms.
Aspect ratios are compared orientation-free (long side over short side)
because stated ratios carry no orientation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..config import ScaleConfig, ToleranceConfig
from ..geometry import BBox, FloorPlan, footprint
from ..metrics import footprints_adjacent
from .model import Relation, RelationKind, RoomConstraint, RoomRef, ordinal_index
from .regions import Enclosure, plan_enclosure, region_of

CRITERIA = ("type", "region", "size", "relations")


@dataclass
class ConstraintVerdict:
    constraint: RoomConstraint
    room_index: Optional[int]
    type: bool
    region: Optional[bool] = None
    size: Optional[bool] = None
    relations: Optional[bool] = None
    relation_results: list[bool] = field(default_factory=list)

    @property
    def satisfied(self) -> bool:
        return all(getattr(self, c) in (True, None) for c in CRITERIA)


@dataclass
class ConstraintReport:
    verdicts: list[ConstraintVerdict]

    def rate(self, criterion: str) -> Optional[float]:
        """Fraction satisfied among constraints where ``criterion`` applies."""
        values = [getattr(v, criterion) for v in self.verdicts]
        values = [x for x in values if x is not None]
        return sum(values) / len(values) if values else None

    @property
    def rates(self) -> dict[str, Optional[float]]:
        return {c: self.rate(c) for c in CRITERIA}

    @property
    def all_satisfied(self) -> bool:
        return all(v.satisfied for v in self.verdicts)

    def to_json(self) -> dict:
        return {
            "rates": self.rates,
            "all_satisfied": self.all_satisfied,
            "verdicts": [
                {
                    "room_type": v.constraint.room_type.token,
                    "instance_tag": v.constraint.instance_tag,
                    "room_index": v.room_index,
                    **{c: getattr(v, c) for c in CRITERIA},
                }
                for v in self.verdicts
            ],
        }


def _rel_ok(actual: float, target: float, tol: float) -> bool:
    return abs(actual - target) <= tol * target


def _long_over_short(r: float) -> float:
    return r if r >= 1 else 1 / r


def size_ok(b: BBox, c: RoomConstraint, scale: ScaleConfig, tol: ToleranceConfig) -> Optional[bool]:
    fpp = scale.feet_per_pixel
    checks = []
    if c.area_sqft is not None:
        checks.append(_rel_ok(b.h * b.w * fpp * fpp, c.area_sqft, tol.area_rel))
    if c.width_ft is not None:
        checks.append(_rel_ok(b.w * fpp, c.width_ft, tol.area_rel))
    if c.length_ft is not None:
        checks.append(_rel_ok(b.h * fpp, c.length_ft, tol.area_rel))
    if c.aspect_ratio is not None:
        checks.append(_rel_ok(_long_over_short(b.w / b.h), _long_over_short(c.aspect_ratio), tol.ratio_rel))
    return all(checks) if checks else None


def region_ok(b: BBox, c: RoomConstraint, enc: Optional[Enclosure]) -> Optional[bool]:
    if c.region is None:
        return None
    return enc is not None and region_of(b, enc) is c.region


def relation_holds(kind: RelationKind, subject: BBox, targets: list[BBox], enc: Optional[Enclosure], gap: int) -> bool:
    s = footprint(subject)
    if kind is RelationKind.NEXT_TO:
        return footprints_adjacent(s, footprint(targets[0]), gap)
    if kind is RelationKind.INSIDE:
        t = footprint(targets[0])
        return t[0] <= s[0] and t[1] <= s[1] and s[2] <= t[2] and s[3] <= t[3]
    if kind is RelationKind.BETWEEN:
        a, b = targets
        if footprints_adjacent(s, footprint(a), gap) and footprints_adjacent(s, footprint(b), gap):
            return True
        lo_x, hi_x = sorted((a.x, b.x))
        lo_y, hi_y = sorted((a.y, b.y))
        return (lo_x < subject.x < hi_x) or (lo_y < subject.y < hi_y)
    if kind is RelationKind.OPPOSITE:
        if enc is None:
            return False
        e = enc.enclosing if hasattr(enc, "enclosing") else enc
        t = targets[0]
        return (subject.x - e.x) * (t.x - e.x) + (subject.y - e.y) * (t.y - e.y) < 0
    raise ValueError(f"unknown relation kind {kind!r}")


def _verdict_cost(b: BBox, c: RoomConstraint, enc, scale, tol) -> int:
    return sum(v is False for v in (region_ok(b, c, enc), size_ok(b, c, scale, tol)))


def match_constraints(
    fp: FloorPlan,
    cs: list[RoomConstraint],
    scale: ScaleConfig = ScaleConfig(),
    tol: ToleranceConfig = ToleranceConfig(),
    enc: Optional[Enclosure] = None,
) -> list[Optional[int]]:
    """Room index per constraint (``None`` when no room of the type is left)."""
    if enc is None:
        enc = plan_enclosure(fp)
    out: list[Optional[int]] = [None] * len(cs)
    for t in {c.room_type for c in cs}:
        ci = [i for i, c in enumerate(cs) if c.room_type is t]
        ri = fp.rooms_of(t)
        if not ri:
            continue
        cost = np.zeros((len(ci), len(ri)))
        for a, i in enumerate(ci):
            k = ordinal_index(cs[i].instance_tag)
            for b, j in enumerate(ri):
                cost[a, b] = _verdict_cost(fp.rooms[j].bbox, cs[i], enc, scale, tol)
                # prefer ordinal order among otherwise equal choices
                if k is not None and k != b:
                    cost[a, b] += 1e-3
        rows, cols = linear_sum_assignment(cost)
        for a, b in zip(rows, cols):
            out[ci[a]] = ri[b]
    return out


def resolve_ref(ref: RoomRef, fp: FloorPlan, cs: list[RoomConstraint], matched: list[Optional[int]]) -> list[int]:
    """Candidate room indices a reference may denote."""
    for i, c in enumerate(cs):
        if c.ref == ref and matched[i] is not None:
            return [matched[i]]
    same = fp.rooms_of(ref.room_type)
    k = ordinal_index(ref.instance_tag)
    if k is not None and k < len(same):
        return [same[k]]
    return same


def check_relation(
    rel: Relation, subject: int, fp: FloorPlan, cs, matched, enc, gap: int
) -> bool:
    candidates = [resolve_ref(t, fp, cs, matched) for t in rel.targets]
    if any(not c for c in candidates):
        return False
    b = fp.rooms[subject].bbox
    if rel.kind is RelationKind.BETWEEN:
        return any(
            relation_holds(rel.kind, b, [fp.rooms[x].bbox, fp.rooms[y].bbox], enc, gap)
            for x in candidates[0]
            for y in candidates[1]
            if x != y
        )
    return any(relation_holds(rel.kind, b, [fp.rooms[x].bbox], enc, gap) for x in candidates[0] if x != subject)


def check_constraints(
    fp: FloorPlan,
    cs: list[RoomConstraint],
    scale: ScaleConfig = ScaleConfig(),
    tol: ToleranceConfig = ToleranceConfig(),
) -> ConstraintReport:
    enc = plan_enclosure(fp)
    matched = match_constraints(fp, cs, scale, tol, enc)
    verdicts = []
    for c, j in zip(cs, matched):
        if j is None:
            verdicts.append(
                ConstraintVerdict(
                    c,
                    None,
                    type=False,
                    region=False if c.region else None,
                    size=False if size_ok(BBox(0, 0, 1, 1), c, scale, tol) is not None else None,
                    relations=False if c.relations else None,
                )
            )
            continue
        b = fp.rooms[j].bbox
        results = [check_relation(r, j, fp, cs, matched, enc, tol.adjacency_gap) for r in c.relations]
        verdicts.append(
            ConstraintVerdict(
                c,
                j,
                type=True,
                region=region_ok(b, c, enc),
                size=size_ok(b, c, scale, tol),
                relations=all(results) if results else None,
                relation_results=results,
            )
        )
    return ConstraintReport(verdicts)
