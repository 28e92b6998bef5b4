"""Corpus files: one JSON-lines annotation file plus a directory of label-map PNGs.

Each line holds one record::

    {"id": "plan-0001", "split": "train",
     "boundary": "+ 128 128 200 180 - 60 50 40 30",
     "image": "plan-0001.png",
     "rooms": [{"type": "Balcony", "x": 87, "y": 66, "h": 18, "w": 23}, ...],
     "human_instruction": null,
     "artificial_instruction": "The balcony is ..."}

``boundary`` is the boundary sequence; when a label map is available the
outline is taken from it instead (any nonzero pixel is interior).
Instructions are either a plain string or a list of per-room sections.
"""

from __future__ import annotations

import json
import statistics
import warnings
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import jsonschema
import numpy as np
from scipy import ndimage

from .boundary import decompose, fit_to_token_range, reconstruct
from .geometry import GRID_SIZE, TOKEN_MAX, BBox, FloorPlan, GeometryError, Room, RoomType, bbox_from_footprint, clipped_footprint, footprint
from .imaging import UNASSIGNED, LabelMapError, label_image, load_label_png, save_label_png
from .instruction import lexicon as lx
from .instruction.parser import split_sentences
from .metrics import _PAINT_RANK
from .sequence import DecodeError, decode_boundary, encode_boundary

SPLITS = ("warmup", "train", "test")
BOX_TOLERANCE = 2

Document = Union[str, list]

_DOC_SCHEMA = {"oneOf": [{"type": "null"}, {"type": "string"}, {"type": "array", "items": {"type": "string"}}]}
RECORD_SCHEMA = {
    "type": "object",
    "required": ["id", "rooms"],
    "additionalProperties": False,
    "properties": {
        "id": {"type": "string", "pattern": r"^[A-Za-z0-9_.\-]+$"},
        "split": {"enum": list(SPLITS)},
        "boundary": {"type": ["string", "null"]},
        "image": {"type": ["string", "null"]},
        "rooms": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["type", "x", "y", "h", "w"],
                "additionalProperties": False,
                "properties": {
                    "type": {"enum": [t.token for t in RoomType]},
                    "x": {"type": "integer", "minimum": 0, "maximum": TOKEN_MAX},
                    "y": {"type": "integer", "minimum": 0, "maximum": TOKEN_MAX},
                    "h": {"type": "integer", "minimum": 1, "maximum": TOKEN_MAX},
                    "w": {"type": "integer", "minimum": 1, "maximum": TOKEN_MAX},
                },
            },
        },
        "human_instruction": _DOC_SCHEMA,
        "artificial_instruction": _DOC_SCHEMA,
    },
}
_VALIDATOR = jsonschema.Draft7Validator(RECORD_SCHEMA)


class CorpusError(ValueError):
    pass


class CorpusWarning(UserWarning):
    pass


@dataclass(eq=False)
class PlanRecord:
    id: str
    boundary: np.ndarray
    rooms: tuple
    human_instruction: Optional[Document] = None
    artificial_instruction: Optional[Document] = None
    split: str = "train"
    label_map: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if self.split not in SPLITS:
            raise CorpusError(f"record {self.id}: split must be one of {SPLITS}, got {self.split!r}")
        self.rooms = tuple(self.rooms)

    @property
    def plan(self) -> FloorPlan:
        return FloorPlan(self.rooms, self.boundary)

    def instruction(self, kind: str = "human") -> Optional[str]:
        """Instruction as one text (sections joined by spaces)."""
        doc = self.human_instruction if kind == "human" else self.artificial_instruction
        return doc_text(doc)


def doc_text(doc: Optional[Document]) -> Optional[str]:
    if doc is None:
        return None
    if isinstance(doc, str):
        return doc
    return " ".join(s.strip() for s in doc if s.strip())


# -- single plans -------------------------------------------------------------

PLAN_SCHEMA = {
    "type": "object",
    "required": ["rooms"],
    "properties": {
        "rooms": RECORD_SCHEMA["properties"]["rooms"] | {"minItems": 0},
        "boundary": {"type": ["string", "null"]},
    },
}
_PLAN_VALIDATOR = jsonschema.Draft7Validator(PLAN_SCHEMA)


def plan_to_json(fp: FloorPlan) -> dict:
    """``{"rooms": [...], "boundary": "+ ..."}``; the boundary key is omitted without an outline."""
    d: dict = {"rooms": [{"type": r.type.token, **dict(zip("xyhw", r.bbox.as_tuple()))} for r in fp.rooms]}
    if fp.boundary is not None and fp.boundary.any():
        d["boundary"] = encode_boundary(decompose(fp.boundary))
    return d


def plan_from_json(d) -> FloorPlan:
    errors = sorted(_PLAN_VALIDATOR.iter_errors(d), key=lambda e: list(e.path))
    if errors:
        e = errors[0]
        loc = "/".join(str(p) for p in e.path) or "plan"
        raise CorpusError(f"schema error at {loc}: {e.message}")
    rooms = tuple(_room_from_json(r) for r in d["rooms"])
    mask = None
    if d.get("boundary"):
        mask = reconstruct(decode_boundary(d["boundary"]), strict=False)
    return FloorPlan(rooms, mask)


# -- loading ------------------------------------------------------------------


def _warn(msg: str) -> None:
    warnings.warn(msg, CorpusWarning, stacklevel=3)


def _edge_line(grid: np.ndarray, axis_x: bool, at: int, lo: int, hi: int) -> Optional[np.ndarray]:
    if not 0 <= at < grid.shape[0] or lo > hi:
        return None
    lo, hi = max(lo, 0), min(hi, grid.shape[0] - 1)
    return grid[lo : hi + 1, at] if axis_x else grid[at, lo : hi + 1]


def box_disagreement(
    grid: np.ndarray, room: Room, others: Sequence[Room] = (), tol: int = BOX_TOLERANCE
) -> list[str]:
    """Edges of ``room`` that the label map contradicts by more than ``tol`` pixels.

    An edge has moved outward when the line ``tol + 1`` pixels beyond it is
    mostly this room's label (pixels inside ``others`` of the same type do
    not count), and inward when the line ``tol`` pixels inside it is mostly
    something that cannot be this room (a label painted earlier).
    """
    x0, y0, x1, y1 = footprint(room.bbox)
    label = room.type.label
    rank = _PAINT_RANK[room.type]
    later = np.zeros(256, dtype=bool)
    later[label] = True
    for t in RoomType:
        if _PAINT_RANK[t] > rank:
            later[t.label] = True
    own = grid == label
    for other in others:
        if other.type is room.type and other is not room:
            box = clipped_footprint(other.bbox, grid.shape[0])
            if box is not None:
                own[box[1] : box[3] + 1, box[0] : box[2] + 1] = False
    possible = later[grid]
    out = []
    sides = (
        ("left", True, x0 - tol - 1, x0 + tol, y0, y1),
        ("right", True, x1 + tol + 1, x1 - tol, y0, y1),
        ("top", False, y0 - tol - 1, y0 + tol, x0, x1),
        ("bottom", False, y1 + tol + 1, y1 - tol, x0, x1),
    )
    for name, axis_x, outside, inside, lo, hi in sides:
        beyond = _edge_line(own, axis_x, outside, lo, hi)
        within = _edge_line(possible, axis_x, inside, lo, hi)
        if beyond is not None and beyond.size and beyond.mean() > 0.5:
            out.append(f"{name} edge extends outward")
        elif within is not None and within.size and within.mean() < 0.5:
            out.append(f"{name} edge lies inward")
    return out


def _room_from_json(d: dict) -> Room:
    return Room(RoomType.from_name(d["type"]), BBox(d["x"], d["y"], d["h"], d["w"]))


def _record_from_json(d: dict, images_path: Optional[Path], where: str) -> PlanRecord:
    errors = sorted(_VALIDATOR.iter_errors(d), key=lambda e: list(e.path))
    if errors:
        e = errors[0]
        loc = "/".join(str(p) for p in e.path) or "record"
        raise CorpusError(f"{where}: schema error at {loc}: {e.message}")
    rid = d["id"]
    rooms = tuple(_room_from_json(r) for r in d["rooms"])
    grid = None
    mask = None
    if d.get("image") and images_path is not None:
        try:
            grid = load_label_png(images_path / d["image"])
        except (OSError, LabelMapError) as exc:
            raise CorpusError(f"record {rid}: {exc}") from None
        mask = grid != 0
        for room in rooms:
            problems = box_disagreement(grid, room, rooms)
            if problems:
                _warn(f"record {rid}: {room.type.token} box {room.bbox.as_tuple()} disagrees with label map ({', '.join(problems)})")
    if d.get("boundary"):
        try:
            seq_mask = reconstruct(decode_boundary(d["boundary"]), strict=False)
        except (DecodeError, GeometryError) as exc:
            raise CorpusError(f"record {rid}: bad boundary sequence: {exc}") from None
        if mask is None:
            mask = seq_mask
        elif not np.array_equal(mask, seq_mask):
            _warn(f"record {rid}: boundary sequence and label map outlines differ")
    if mask is None:
        raise CorpusError(f"record {rid}: needs a boundary sequence or a label map")
    if not mask.any():
        raise CorpusError(f"record {rid}: empty outline")
    mask, trimmed = fit_to_token_range(mask)
    if trimmed:
        _warn(f"record {rid}: outline spans the full grid; far edge trimmed by one pixel")
    return PlanRecord(
        id=rid,
        boundary=mask,
        rooms=rooms,
        human_instruction=d.get("human_instruction"),
        artificial_instruction=d.get("artificial_instruction"),
        split=d.get("split", "train"),
        label_map=grid,
    )


def load_corpus(annotations_path: Union[str, Path], images_path: Union[str, Path, None] = None) -> list[PlanRecord]:
    """Read and validate a corpus; raises :class:`CorpusError` naming the bad record."""
    annotations_path = Path(annotations_path)
    if images_path is None:
        images_path = annotations_path.parent
    images_path = Path(images_path)
    records = []
    seen: set[str] = set()
    with open(annotations_path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            where = f"{annotations_path.name}:{lineno}"
            try:
                d = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{where}: invalid JSON: {exc.msg}") from None
            rec = _record_from_json(d, images_path, where)
            if rec.id in seen:
                raise CorpusError(f"{where}: duplicate record id {rec.id!r}")
            seen.add(rec.id)
            records.append(rec)
    return records


# -- saving -------------------------------------------------------------------


def record_to_json(rec: PlanRecord, image: Optional[str] = None) -> dict:
    return {
        "id": rec.id,
        "split": rec.split,
        "boundary": encode_boundary(decompose(rec.boundary)),
        "image": image,
        "rooms": plan_to_json(FloorPlan(rec.rooms))["rooms"],
        "human_instruction": rec.human_instruction,
        "artificial_instruction": rec.artificial_instruction,
    }


def save_corpus(
    records: Sequence[PlanRecord],
    annotations_path: Union[str, Path],
    images_path: Union[str, Path, None] = None,
    write_images: bool = True,
) -> None:
    """Write records in the given order; label maps go next to the annotations by default."""
    annotations_path = Path(annotations_path)
    images_path = Path(images_path) if images_path is not None else annotations_path.parent
    ids = [r.id for r in records]
    dup = [i for i, n in Counter(ids).items() if n > 1]
    if dup:
        raise CorpusError(f"duplicate record id {dup[0]!r}")
    if write_images:
        images_path.mkdir(parents=True, exist_ok=True)
    lines = []
    for rec in records:
        image = None
        if write_images:
            image = f"{rec.id}.png"
            save_label_png(label_image(rec.plan), images_path / image)
        lines.append(json.dumps(record_to_json(rec, image), ensure_ascii=False) + "\n")
    annotations_path.parent.mkdir(parents=True, exist_ok=True)
    annotations_path.write_text("".join(lines), encoding="utf-8")


# -- statistics ---------------------------------------------------------------


def word_count(text: str) -> int:
    return len(text.split())


def sentence_count(text: str) -> int:
    return len(split_sentences(text))


def room_sections(doc: Document) -> list[str]:
    """Per-room text buckets of a document.

    A list document is already sectioned. A plain string is split into
    sentences; each sentence joins the bucket of the first room it mentions,
    or the previous sentence's bucket when it mentions none.
    """
    if isinstance(doc, list):
        return [s for s in doc if s.strip()]
    buckets: dict[tuple, list[str]] = {}
    current = None
    for sent in split_sentences(doc):
        m = lx.MENTION_RE.search(sent)
        if m is not None:
            kind = next(k for k, v in m.groupdict().items() if k.startswith("g") and v)
            current = (lx.MENTION_TYPES[kind], lx.normalize_ordinal(m.group("ord")))
        if current is not None:
            buckets.setdefault(current, []).append(sent)
    return [" ".join(v) for v in buckets.values()]


@dataclass
class DocStats:
    documents: int
    words_per_instance: float
    sentences_per_instance: float
    words_per_room: Optional[float]
    sentences_per_room: Optional[float]

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class CorpusStats:
    records: int
    room_counts: dict[str, int]
    rooms_per_plan: dict[int, int]
    human: Optional[DocStats]
    artificial: Optional[DocStats]

    def to_json(self) -> dict:
        return {
            "records": self.records,
            "room_counts": self.room_counts,
            "rooms_per_plan": {str(k): v for k, v in self.rooms_per_plan.items()},
            "human": self.human.to_json() if self.human else None,
            "artificial": self.artificial.to_json() if self.artificial else None,
        }


def _doc_stats(docs: list[Document]) -> Optional[DocStats]:
    if not docs:
        return None
    texts = [doc_text(d) for d in docs]
    sections = [s for d in docs for s in room_sections(d)]
    return DocStats(
        documents=len(docs),
        words_per_instance=statistics.fmean(word_count(t) for t in texts),
        sentences_per_instance=statistics.fmean(sentence_count(t) for t in texts),
        words_per_room=statistics.fmean(word_count(s) for s in sections) if sections else None,
        sentences_per_room=statistics.fmean(sentence_count(s) for s in sections) if sections else None,
    )


def compute_stats(corpus: Iterable[PlanRecord]) -> CorpusStats:
    corpus = list(corpus)
    counts = Counter(r.type for rec in corpus for r in rec.rooms)
    hist = Counter(len(rec.rooms) for rec in corpus)
    return CorpusStats(
        records=len(corpus),
        room_counts={t.token: counts.get(t, 0) for t in RoomType},
        rooms_per_plan=dict(sorted(hist.items())),
        human=_doc_stats([rec.human_instruction for rec in corpus if rec.human_instruction is not None]),
        artificial=_doc_stats([rec.artificial_instruction for rec in corpus if rec.artificial_instruction is not None]),
    )


# -- upstream import ----------------------------------------------------------


def load_palette(path: Union[str, Path]) -> tuple[Optional[int], dict]:
    """Read a palette description.

    Format: ``{"channel": 1, "values": {"0": "exterior", "13": "interior",
    "1": "LivingRoom", ...}}``. Keys are pixel values, or ``"r,g,b"`` for
    color images read without a channel. Targets are room type names,
    ``exterior`` or ``interior``.
    """
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    channel = data.get("channel")
    table = {}
    for key, target in data["values"].items():
        value = tuple(int(v) for v in key.split(",")) if "," in key else int(key)
        if target == "exterior":
            table[value] = 0
        elif target == "interior":
            table[value] = UNASSIGNED
        else:
            table[value] = RoomType.from_name(target).label
    return channel, table


def _components_to_rooms(grid: np.ndarray, source: str) -> list[Room]:
    rooms = []
    for t in RoomType:
        labelled, n = ndimage.label(grid == t.label)
        for sl in ndimage.find_objects(labelled):
            ys, xs = sl
            x0, x1 = xs.start, xs.stop - 1
            y0, y1 = ys.start, ys.stop - 1
            if x1 - x0 + 1 > TOKEN_MAX or y1 - y0 + 1 > TOKEN_MAX:
                _warn(f"{source}: {t.token} spans the full grid; far edge trimmed by one pixel")
                x1 = min(x1, x0 + TOKEN_MAX - 1)
                y1 = min(y1, y0 + TOKEN_MAX - 1)
            rooms.append(Room(t, bbox_from_footprint(x0, y0, x1, y1)))
    return rooms


def convert_image(path: Union[str, Path], channel: Optional[int], table: dict) -> np.ndarray:
    """Map an upstream image to label indices using a palette table."""
    from PIL import Image

    with Image.open(path) as img:
        arr = np.array(img)
    if arr.shape[:2] != (GRID_SIZE, GRID_SIZE):
        raise CorpusError(f"{path}: expected {GRID_SIZE}x{GRID_SIZE} pixels")
    if channel is not None:
        arr = arr[..., channel] if arr.ndim == 3 else arr
        keys = arr.astype(np.int64)
        lookup = {k: v for k, v in table.items() if isinstance(k, int)}
    else:
        if arr.ndim == 3:
            arr = arr[..., :3].astype(np.int64)
            keys = (arr[..., 0] << 16) | (arr[..., 1] << 8) | arr[..., 2]
            lookup = {(k[0] << 16) | (k[1] << 8) | k[2]: v for k, v in table.items() if isinstance(k, tuple)}
        else:
            keys = arr.astype(np.int64)
            lookup = {k: v for k, v in table.items() if isinstance(k, int)}
    out = np.zeros(keys.shape, dtype=np.uint8)
    seen = np.unique(keys)
    for value in seen:
        if int(value) not in lookup:
            raise CorpusError(f"{path}: unknown label value {int(value)} (not in palette)")
        out[keys == value] = lookup[int(value)]
    return out


def import_upstream(
    images_dir: Union[str, Path],
    palette_path: Union[str, Path],
    instructions_path: Union[str, Path, None] = None,
    default_split: str = "train",
) -> list[PlanRecord]:
    """Build records from a directory of upstream label images.

    ``instructions_path`` optionally names a JSON object keyed by image stem
    with ``human``, ``artificial`` and ``split`` entries.
    """
    channel, table = load_palette(palette_path)
    extra = {}
    if instructions_path is not None:
        extra = json.loads(Path(instructions_path).read_text(encoding="utf-8"))
    records = []
    for path in sorted(Path(images_dir).glob("*.png")):
        grid = convert_image(path, channel, table)
        mask, trimmed = fit_to_token_range(grid != 0)
        if trimmed:
            _warn(f"{path.name}: outline spans the full grid; far edge trimmed by one pixel")
        rooms = _components_to_rooms(np.where(mask, grid, 0), path.name)
        if not rooms:
            raise CorpusError(f"{path.name}: no rooms found")
        info = extra.get(path.stem, {})
        records.append(
            PlanRecord(
                id=path.stem,
                boundary=mask,
                rooms=tuple(rooms),
                human_instruction=info.get("human"),
                artificial_instruction=info.get("artificial"),
                split=info.get("split", default_split),
            )
        )
    return records
