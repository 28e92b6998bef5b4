"""Constraint-driven layout baseline: simulated annealing over room boxes.

Room ``i`` of the output corresponds to constraint ``i``. The search runs in
coordinates local to the enclosing box and keeps every room inside it;
placement outside the interior (notches of an L-shape) is penalized by the
``outside`` term rather than forbidden.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .boundary import BoundarySpec, reconstruct
from .config import CostWeights, ScaleConfig, SolverConfig
from .geometry import FloorPlan, Room, RoomType, bbox_from_footprint, footprint
from .instruction.model import REGION_CELL, REGION_GRID, RelationKind, RoomConstraint, RoomRef, ordinal_index
from .instruction.regions import region_cell
from .metrics import DEFAULT_GAP, footprints_adjacent

TERMS = ("region", "area", "ratio", "relation", "overlap", "outside", "coverage")
MOVE_SCALES = (1, 2, 4, 8, 16)


class SolverError(ValueError):
    pass


def _center(f) -> tuple[int, int]:
    # same convention as BBox: x = x0 + w // 2
    return f[0] + (f[2] - f[0] + 1) // 2, f[1] + (f[3] - f[1] + 1) // 2


@dataclass
class _Target:
    room_type: RoomType
    area: Optional[float] = None  # pixels
    width: Optional[float] = None
    height: Optional[float] = None
    ratio: Optional[float] = None  # long side over short side
    cell: Optional[tuple[int, int, int, int]] = None  # local inclusive rect
    region_rc: Optional[tuple[int, int]] = None
    relations: list[tuple[RelationKind, list[list[int]]]] = field(default_factory=list)


class LayoutProblem:
    """Precomputed boundary data and pixel targets for fast cost evaluation.

    Boxes are handled as local inclusive footprints ``[x0, y0, x1, y1]``
    relative to the enclosing box origin.
    """

    def __init__(
        self,
        cs: Sequence[RoomConstraint],
        bs: BoundarySpec,
        weights: CostWeights = CostWeights(),
        scale: ScaleConfig = ScaleConfig(),
        gap: int = DEFAULT_GAP,
        mask: Optional[np.ndarray] = None,
    ):
        self.constraints = list(cs)
        self.bs = bs
        self.weights = weights
        self.gap = gap
        self.mask = reconstruct(bs, strict=False) if mask is None else np.asarray(mask, dtype=bool)
        ex0, ey0, ex1, ey1 = footprint(bs.enclosing)
        self.origin = (ex0, ey0)
        self.W = ex1 - ex0 + 1
        self.H = ey1 - ey0 + 1
        self.diag = math.hypot(self.W, self.H)
        self.interior = self.mask[ey0 : ey1 + 1, ex0 : ex1 + 1]
        self.interior_total = int(self.interior.sum())
        sat = np.zeros((self.H + 1, self.W + 1), dtype=np.int64)
        sat[1:, 1:] = self.interior.cumsum(0).cumsum(1)
        self.sat = sat.tolist()
        self.targets = [self._target(c, scale) for c in self.constraints]
        for c, t in zip(self.constraints, self.targets):
            for rel in c.relations:
                t.relations.append((rel.kind, [self._resolve(ref) for ref in rel.targets]))
        self.n_relations = sum(len(t.relations) for t in self.targets)

    def _target(self, c: RoomConstraint, scale: ScaleConfig) -> _Target:
        fpp = scale.feet_per_pixel
        t = _Target(c.room_type)
        if c.area_sqft is not None:
            t.area = c.area_sqft / (fpp * fpp)
        if c.width_ft is not None:
            t.width = c.width_ft / fpp
        if c.length_ft is not None:
            t.height = c.length_ft / fpp
        if c.aspect_ratio is not None:
            t.ratio = c.aspect_ratio if c.aspect_ratio >= 1 else 1 / c.aspect_ratio
        if c.region is not None:
            x0, y0, x1, y1 = region_cell(c.region, self.bs)
            ox, oy = self.origin
            t.cell = (x0 - ox, y0 - oy, x1 - ox, y1 - oy)
            t.region_rc = REGION_CELL[c.region]
        return t

    def _resolve(self, ref: RoomRef) -> list[int]:
        for i, c in enumerate(self.constraints):
            if c.ref == ref:
                return [i]
        same = [i for i, c in enumerate(self.constraints) if c.room_type is ref.room_type]
        k = ordinal_index(ref.instance_tag)
        if k is not None and k < len(same):
            return [same[k]]
        return same

    # -- cost -----------------------------------------------------------------

    def _inside(self, f) -> int:
        x0, y0 = max(f[0], 0), max(f[1], 0)
        x1, y1 = min(f[2], self.W - 1), min(f[3], self.H - 1)
        if x0 > x1 or y0 > y1:
            return 0
        s = self.sat
        return s[y1 + 1][x1 + 1] - s[y0][x1 + 1] - s[y1 + 1][x0] + s[y0][x0]

    def terms(self, boxes: Sequence[Sequence[int]], extra: Sequence[Sequence[int]] = ()) -> dict[str, float]:
        """Unweighted cost terms, each in [0, 1].

        ``boxes[i]`` is the room matched to constraint ``i``; ``extra`` holds
        unconstrained rooms that still take space.
        """
        W, H = self.W, self.H
        region_err = []
        size_err = []
        ratio_err = []
        for f, t in zip(boxes, self.targets):
            w = f[2] - f[0] + 1
            h = f[3] - f[1] + 1
            if t.cell is not None:
                cx = f[0] + w // 2
                cy = f[1] + h // 2
                rc = (min(max(3 * cy // H, 0), 2), min(max(3 * cx // W, 0), 2))
                if rc == t.region_rc:
                    region_err.append(0.0)
                else:
                    c = t.cell
                    dx = max(c[0] - cx, 0, cx - c[2])
                    dy = max(c[1] - cy, 0, cy - c[3])
                    region_err.append(min(1.0, math.hypot(dx, dy) / self.diag))
            errs = []
            if t.area is not None:
                errs.append(min(1.0, abs(w * h - t.area) / t.area))
            if t.width is not None:
                errs.append(min(1.0, abs(w - t.width) / t.width))
            if t.height is not None:
                errs.append(min(1.0, abs(h - t.height) / t.height))
            if errs:
                size_err.append(sum(errs) / len(errs))
            if t.ratio is not None:
                r = w / h if w >= h else h / w
                ratio_err.append(min(1.0, abs(r - t.ratio) / t.ratio))

        violated = 0
        for i, t in enumerate(self.targets):
            for kind, cands in t.relations:
                if not self._relation_ok(i, kind, cands, boxes):
                    violated += 1

        allboxes = list(boxes) + list(extra)
        overlap = 0
        area_total = 0
        inside_total = 0
        cover = np.zeros((H, W), dtype=bool)
        for k, f in enumerate(allboxes):
            area_total += (f[2] - f[0] + 1) * (f[3] - f[1] + 1)
            inside_total += self._inside(f)
            x0, y0 = max(f[0], 0), max(f[1], 0)
            if x0 <= f[2] and y0 <= f[3]:
                cover[y0 : f[3] + 1, x0 : f[2] + 1] = True
            for g in allboxes[k + 1 :]:
                ox = min(f[2], g[2]) - max(f[0], g[0]) + 1
                oy = min(f[3], g[3]) - max(f[1], g[1]) + 1
                if ox > 0 and oy > 0:
                    overlap += ox * oy
        covered = int(np.count_nonzero(cover & self.interior))
        interior = max(self.interior_total, 1)

        def mean(xs):
            return sum(xs) / len(xs) if xs else 0.0

        return {
            "region": mean(region_err),
            "area": mean(size_err),
            "ratio": mean(ratio_err),
            "relation": violated / self.n_relations if self.n_relations else 0.0,
            "overlap": min(1.0, overlap / interior),
            "outside": (area_total - inside_total) / area_total if area_total else 0.0,
            "coverage": (self.interior_total - covered) / interior,
        }

    def _relation_ok(self, i: int, kind: RelationKind, cands: list[list[int]], boxes) -> bool:
        f = boxes[i]
        if kind is RelationKind.NEXT_TO:
            return any(j != i and footprints_adjacent(f, boxes[j], self.gap) for j in cands[0])
        if kind is RelationKind.INSIDE:
            return any(
                j != i and boxes[j][0] <= f[0] and boxes[j][1] <= f[1] and f[2] <= boxes[j][2] and f[3] <= boxes[j][3]
                for j in cands[0]
            )
        cx, cy = _center(f)
        if kind is RelationKind.OPPOSITE:
            mx, my = self.W // 2, self.H // 2
            for j in cands[0]:
                if j != i:
                    tx, ty = _center(boxes[j])
                    if (cx - mx) * (tx - mx) + (cy - my) * (ty - my) < 0:
                        return True
            return False
        for a in cands[0]:
            for b in cands[1]:
                if a == b or i in (a, b):
                    continue
                fa, fb = boxes[a], boxes[b]
                if footprints_adjacent(f, fa, self.gap) and footprints_adjacent(f, fb, self.gap):
                    return True
                (ax, ay), (bx, by) = _center(fa), _center(fb)
                ax, bx = sorted((ax, bx))
                ay, by = sorted((ay, by))
                if ax < cx < bx or ay < cy < by:
                    return True
        return False

    def cost(self, boxes, extra=()) -> float:
        terms = self.terms(boxes, extra)
        w = self.weights
        return sum(getattr(w, "w_" + k) * v for k, v in terms.items())

    # -- conversion -----------------------------------------------------------

    def to_local(self, fp_global: tuple[int, int, int, int]) -> list[int]:
        ox, oy = self.origin
        return [fp_global[0] - ox, fp_global[1] - oy, fp_global[2] - ox, fp_global[3] - oy]

    def to_plan(self, boxes) -> FloorPlan:
        ox, oy = self.origin
        rooms = tuple(
            Room(t.room_type, bbox_from_footprint(f[0] + ox, f[1] + oy, f[2] + ox, f[3] + oy))
            for f, t in zip(boxes, self.targets)
        )
        return FloorPlan(rooms, self.mask)

    # -- initialization -------------------------------------------------------

    def check_feasible(self) -> None:
        for c, t in zip(self.constraints, self.targets):
            name = c.room_type.display_name
            if t.width is not None and round(t.width) > self.W:
                raise SolverError(f"{name} width {t.width:.0f}px exceeds the enclosing width {self.W}px")
            if t.height is not None and round(t.height) > self.H:
                raise SolverError(f"{name} length {t.height:.0f}px exceeds the enclosing height {self.H}px")
            if t.area is not None and t.area > self.W * self.H:
                raise SolverError(f"{name} area exceeds the enclosing box")

    def initial_sizes(self) -> list[tuple[int, int]]:
        known = [t.area for t in self.targets if t.area is not None]
        fallback = (sum(known) / len(known)) if known else self.interior_total / max(len(self.targets), 1)
        sizes = []
        for t in self.targets:
            w, h = t.width, t.height
            area = t.area
            if area is None and w is not None and h is not None:
                area = w * h
            if w is None and h is None:
                a = area if area is not None else fallback
                r = t.ratio or 1.0
                w, h = math.sqrt(a * r), math.sqrt(a / r)
            elif w is None:
                w = area / h if area is not None else h * (t.ratio or 1.0)
            elif h is None:
                h = area / w if area is not None else w / (t.ratio or 1.0)
            sizes.append((min(max(int(round(w)), 1), self.W), min(max(int(round(h)), 1), self.H)))
        return sizes

    def place(self, w: int, h: int, cx: float, cy: float) -> list[int]:
        x0 = int(round(cx)) - w // 2
        y0 = int(round(cy)) - h // 2
        x0 = min(max(x0, 0), self.W - w)
        y0 = min(max(y0, 0), self.H - h)
        return [x0, y0, x0 + w - 1, y0 + h - 1]

    def initial_boxes(self, rng: Optional[random.Random] = None) -> list[list[int]]:
        boxes = []
        for (w, h), t in zip(self.initial_sizes(), self.targets):
            if t.cell is not None:
                cx = (t.cell[0] + t.cell[2]) / 2
                cy = (t.cell[1] + t.cell[3]) / 2
            else:
                cx, cy = (self.W - 1) / 2, (self.H - 1) / 2
            if rng is not None:
                cx += rng.uniform(-self.W / 6, self.W / 6)
                cy += rng.uniform(-self.H / 6, self.H / 6)
            boxes.append(self.place(w, h, cx, cy))
        return boxes


@dataclass
class SolveResult:
    plan: FloorPlan
    cost: float
    restart: int
    traces: list[list[float]]


def _propose(problem: LayoutProblem, boxes: list[list[int]], rng: random.Random, progress: float):
    """Return ``[(index, new_box), ...]`` for one random move, or None."""
    n = len(boxes)
    i = rng.randrange(n)
    k = max(1, min(len(MOVE_SCALES), int(len(MOVE_SCALES) * (1 - progress) + rng.random())))
    d = MOVE_SCALES[rng.randrange(k)] * (1 if rng.random() < 0.5 else -1)
    f = boxes[i]
    W, H = problem.W, problem.H
    r = rng.random()
    if r < 0.45:
        if rng.random() < 0.5:
            d = min(max(d, -f[0]), W - 1 - f[2])
            new = [f[0] + d, f[1], f[2] + d, f[3]]
        else:
            d = min(max(d, -f[1]), H - 1 - f[3])
            new = [f[0], f[1] + d, f[2], f[3] + d]
        return None if d == 0 else [(i, new)]
    if r < 0.9 or n < 2:
        side = rng.randrange(4)
        new = list(f)
        if side == 0:
            new[0] = min(max(f[0] + d, 0), f[2])
        elif side == 1:
            new[2] = max(min(f[2] + d, W - 1), f[0])
        elif side == 2:
            new[1] = min(max(f[1] + d, 0), f[3])
        else:
            new[3] = max(min(f[3] + d, H - 1), f[1])
        return None if new == f else [(i, new)]
    j = rng.randrange(n - 1)
    j += j >= i
    g = boxes[j]
    fi = problem.place(f[2] - f[0] + 1, f[3] - f[1] + 1, (g[0] + g[2]) / 2, (g[1] + g[3]) / 2)
    fj = problem.place(g[2] - g[0] + 1, g[3] - g[1] + 1, (f[0] + f[2]) / 2, (f[1] + f[3]) / 2)
    return [(i, fi), (j, fj)]


def anneal(
    problem: LayoutProblem,
    start: list[list[int]],
    cfg: SolverConfig,
    rng: random.Random,
) -> tuple[list[list[int]], float, list[float]]:
    """One annealing run; returns best boxes, best cost and the best-cost trace."""
    current = [list(b) for b in start]
    cur_cost = problem.cost(current)
    best, best_cost = [list(b) for b in current], cur_cost
    trace = [best_cost]
    if cur_cost == 0:
        return best, best_cost, trace
    temp = cfg.initial_temperature
    for it in range(cfg.iterations):
        move = _propose(problem, current, rng, it / cfg.iterations)
        if move is not None:
            saved = [(i, current[i]) for i, _ in move]
            for i, box in move:
                current[i] = box
            new_cost = problem.cost(current)
            delta = new_cost - cur_cost
            if delta <= 0 or rng.random() < math.exp(-delta / temp):
                cur_cost = new_cost
                if cur_cost < best_cost:
                    best, best_cost = [list(b) for b in current], cur_cost
            else:
                for i, box in saved:
                    current[i] = box
        trace.append(best_cost)
        temp *= cfg.cooling
        if best_cost == 0:
            break
    return best, best_cost, trace


def solve_detailed(
    cs: Sequence[RoomConstraint],
    bs: BoundarySpec,
    cfg: SolverConfig = SolverConfig(),
    w: CostWeights = CostWeights(),
    scale: ScaleConfig = ScaleConfig(),
    gap: int = DEFAULT_GAP,
) -> SolveResult:
    if not cs:
        raise SolverError("constraint list is empty")
    problems = bs.problems()
    if problems:
        raise SolverError("invalid boundary: " + "; ".join(problems))
    problem = LayoutProblem(cs, bs, w, scale, gap)
    if problem.interior_total == 0:
        raise SolverError("boundary has no interior")
    problem.check_feasible()
    best = None
    traces = []
    for restart in range(cfg.restarts):
        rng = random.Random(cfg.seed * 1_000_003 + restart)
        start = problem.initial_boxes(None if restart == 0 else rng)
        boxes, cost_value, trace = anneal(problem, start, cfg, rng)
        traces.append(trace)
        # strict '<' keeps the lowest restart index on ties
        if best is None or cost_value < best[1]:
            best = (boxes, cost_value, restart)
        if cost_value == 0:
            break
    boxes, cost_value, restart = best
    return SolveResult(problem.to_plan(boxes), cost_value, restart, traces)


def solve(
    cs: Sequence[RoomConstraint],
    bs: BoundarySpec,
    cfg: SolverConfig = SolverConfig(),
    w: CostWeights = CostWeights(),
    scale: ScaleConfig = ScaleConfig(),
    gap: int = DEFAULT_GAP,
) -> FloorPlan:
    return solve_detailed(cs, bs, cfg, w, scale, gap).plan


def match_in_order(fp: FloorPlan, cs: Sequence[RoomConstraint]) -> list[int]:
    """Pair constraints with rooms of the same type in plan-list order."""
    used: set[int] = set()
    order = sorted(range(len(cs)), key=lambda i: (ordinal_index(cs[i].instance_tag) is None, ordinal_index(cs[i].instance_tag) or 0, i))
    out = [-1] * len(cs)
    for i in order:
        j = next((j for j, r in enumerate(fp.rooms) if r.type is cs[i].room_type and j not in used), None)
        if j is None:
            raise SolverError(f"no room left for constraint on {cs[i].room_type.display_name}")
        used.add(j)
        out[i] = j
    return out


def cost_terms(
    fp: FloorPlan,
    cs: Sequence[RoomConstraint],
    bs: BoundarySpec,
    scale: ScaleConfig = ScaleConfig(),
    gap: int = DEFAULT_GAP,
    mask: Optional[np.ndarray] = None,
) -> dict[str, float]:
    problem = LayoutProblem(cs, bs, CostWeights(), scale, gap, mask)
    matched = match_in_order(fp, cs)
    boxes = [problem.to_local(footprint(fp.rooms[j].bbox)) for j in matched]
    rest = set(range(len(fp.rooms))) - set(matched)
    extra = [problem.to_local(footprint(fp.rooms[j].bbox)) for j in sorted(rest)]
    return problem.terms(boxes, extra)


def cost(
    fp: FloorPlan,
    cs: Sequence[RoomConstraint],
    bs: BoundarySpec,
    w: CostWeights = CostWeights(),
    scale: ScaleConfig = ScaleConfig(),
    gap: int = DEFAULT_GAP,
    mask: Optional[np.ndarray] = None,
) -> float:
    """Weighted sum of the cost terms for an existing plan.

    ``mask`` overrides the interior implied by ``bs`` (useful when the plan
    carries its own outline).
    """
    terms = cost_terms(fp, cs, bs, scale, gap, mask)
    return sum(getattr(w, "w_" + k) * v for k, v in terms.items())
