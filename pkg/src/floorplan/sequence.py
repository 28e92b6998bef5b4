"""Target-sequence and boundary-sequence text codecs.

Room block grammar (canonical spacing shown; the decoder tolerates any
whitespace around punctuation)::

    [ Balcony | x coordinate = 87 | y coordinate = 66 | height = 18 | width = 23 ]

A plan is its room blocks joined by single spaces, then ``<eos>``. A
boundary is ``+ x y h w`` for the enclosing box followed by ``- x y h w``
per exterior box.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

from .boundary import BoundarySpec
from .geometry import TOKEN_MAX, BBox, FloorPlan, GeometryError, Room, RoomType

EOS = "<eos>"
FIELDS = (("x", "x coordinate"), ("y", "y coordinate"), ("h", "height"), ("w", "width"))
_LIMITS = {"x": (0, TOKEN_MAX), "y": (0, TOKEN_MAX), "h": (1, TOKEN_MAX), "w": (1, TOKEN_MAX)}
_FIELD_RE = re.compile(r"^\s*([a-z]+(?:\s+[a-z]+)?)\s*=\s*(\S*)\s*$", re.IGNORECASE)
_INT_RE = re.compile(r"^-?(?:0|[1-9]\d*)$")  # canonical decimal, as the encoder writes it


class IssueKind(str, Enum):
    TRUNCATED_BLOCK = "truncated-block"
    BAD_NUMBER = "bad-number"
    UNKNOWN_ROOM_TYPE = "unknown-room-type"
    MISSING_SEPARATOR = "missing-separator"
    VALUE_OUT_OF_RANGE = "value-out-of-range"
    MISSING_EOS = "missing-eos"
    UNEXPECTED_TEXT = "unexpected-text"


class Issue(NamedTuple):
    position: int
    kind: IssueKind


class DecodeError(ValueError):
    def __init__(self, position: int, kind: IssueKind, detail: str = ""):
        self.position = position
        self.kind = kind
        msg = f"{kind.value} at offset {position}"
        super().__init__(f"{msg}: {detail}" if detail else msg)


@dataclass
class DecodeReport:
    plan: FloorPlan
    issues: list[Issue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues


def _check_tokens(b: BBox) -> None:
    for name, (lo, hi) in _LIMITS.items():
        v = getattr(b, name)
        if not lo <= v <= hi:
            raise GeometryError(f"{name}={v} outside token range [{lo}, {hi}]")


def encode_room(room_type: RoomType, b: BBox) -> str:
    _check_tokens(b)
    parts = [f"{label} = {getattr(b, name)}" for name, label in FIELDS]
    return "[ " + " | ".join([room_type.token, *parts]) + " ]"


def encode_plan(fp: FloorPlan) -> str:
    return " ".join([*(encode_room(r.type, r.bbox) for r in fp.rooms), EOS])


def _parse_block(body: str, offset: int) -> Room:
    """Parse the text between ``[`` and ``]``; raise DecodeError on any fault."""
    parts = body.split("|")
    if len(parts) != 1 + len(FIELDS):
        raise DecodeError(offset, IssueKind.MISSING_SEPARATOR, f"expected {1 + len(FIELDS)} fields, got {len(parts)}")
    name = " ".join(parts[0].split())
    if not re.fullmatch(r"[A-Za-z]+(?: [A-Za-z]+)*", name):
        raise DecodeError(offset, IssueKind.UNKNOWN_ROOM_TYPE, repr(name))
    try:
        room_type = RoomType.from_name(name)
    except GeometryError:
        raise DecodeError(offset, IssueKind.UNKNOWN_ROOM_TYPE, repr(name)) from None
    values = {}
    for (key, label), text in zip(FIELDS, parts[1:]):
        m = _FIELD_RE.match(text)
        if m is None or " ".join(m.group(1).lower().split()) != label:
            raise DecodeError(offset, IssueKind.MISSING_SEPARATOR, f"expected '{label} = <int>'")
        raw = m.group(2)
        if not _INT_RE.match(raw):
            raise DecodeError(offset, IssueKind.BAD_NUMBER, repr(raw))
        value = int(raw)
        lo, hi = _LIMITS[key]
        if not lo <= value <= hi:
            raise DecodeError(offset, IssueKind.VALUE_OUT_OF_RANGE, f"{label} = {value}")
        values[key] = value
    return Room(room_type, BBox(**values))


def decode_plan(s: str, mode: str = "strict") -> DecodeReport:
    """Parse a target sequence.

    ``strict`` raises :class:`DecodeError` at the first fault. ``lenient``
    keeps every block that parses, records an :class:`Issue` for everything
    else and resynchronizes at the next ``[``. The returned plan has no
    boundary.
    """
    if mode not in ("strict", "lenient"):
        raise ValueError(f"mode must be 'strict' or 'lenient', got {mode!r}")
    strict = mode == "strict"
    rooms: list[Room] = []
    issues: list[Issue] = []

    def fault(err: DecodeError) -> None:
        if strict:
            raise err
        issues.append(Issue(err.position, err.kind))

    pos, n = 0, len(s)
    seen_eos = False
    while pos < n:
        if s[pos].isspace():
            pos += 1
            continue
        if s.startswith(EOS, pos):
            seen_eos = True
            rest = pos + len(EOS)
            while rest < n and s[rest].isspace():
                rest += 1
            if rest < n:
                fault(DecodeError(rest, IssueKind.UNEXPECTED_TEXT, "text after <eos>"))
            break
        if s[pos] != "[":
            nxt = _next_marker(s, pos)
            fault(DecodeError(pos, IssueKind.UNEXPECTED_TEXT, repr(s[pos:nxt][:20])))
            pos = nxt
            continue
        close = s.find("]", pos + 1)
        reopen = s.find("[", pos + 1)
        if close == -1 or (reopen != -1 and reopen < close):
            fault(DecodeError(pos, IssueKind.TRUNCATED_BLOCK))
            pos = reopen if reopen != -1 else n
            continue
        try:
            rooms.append(_parse_block(s[pos + 1 : close], pos))
        except DecodeError as err:
            fault(err)
        pos = close + 1
    if not seen_eos:
        fault(DecodeError(n, IssueKind.MISSING_EOS))
    return DecodeReport(FloorPlan(tuple(rooms)), issues)


def _next_marker(s: str, pos: int) -> int:
    cands = [i for i in (s.find("[", pos), s.find(EOS, pos)) if i != -1]
    return min(cands) if cands else len(s)


def encode_boundary(bs: BoundarySpec) -> str:
    groups = [("+", bs.enclosing)] + [("-", b) for b in bs.exterior]
    return " ".join(f"{sign} {b.x} {b.y} {b.h} {b.w}" for sign, b in groups)


def decode_boundary(s: str) -> BoundarySpec:
    tokens = s.split()
    if not tokens or tokens[0] != "+":
        raise DecodeError(0, IssueKind.MISSING_SEPARATOR, "boundary must start with '+'")
    groups: list[tuple[str, list[str]]] = []
    for tok in tokens:
        if tok in ("+", "-"):
            groups.append((tok, []))
        else:
            groups[-1][1].append(tok)
    if sum(1 for sign, _ in groups if sign == "+") != 1:
        raise DecodeError(0, IssueKind.MISSING_SEPARATOR, "exactly one '+' group expected")
    boxes = []
    for sign, vals in groups:
        if len(vals) != 4:
            raise DecodeError(0, IssueKind.MISSING_SEPARATOR, f"'{sign}' group has {len(vals)} values, expected 4")
        bad = [v for v in vals if not _INT_RE.match(v)]
        if bad:
            raise DecodeError(0, IssueKind.BAD_NUMBER, repr(bad[0]))
        boxes.append(BBox(*(int(v) for v in vals)))
    return BoundarySpec(boxes[0], tuple(boxes[1:]))


def build_model_input(instructions: str, bs: BoundarySpec) -> str:
    """Instruction text followed by the boundary sequence."""
    text = instructions.rstrip()
    boundary = encode_boundary(bs)
    return f"{text} {boundary}" if text else boundary


def split_model_input(text: str) -> tuple[str, BoundarySpec]:
    """Inverse of :func:`build_model_input` for well-formed inputs."""
    m = re.search(r"(?:^|\s)(\+(?:\s+-?\d+){4}(?:\s+-(?:\s+-?\d+){4})*)\s*$", text)
    if m is None:
        raise DecodeError(len(text), IssueKind.MISSING_SEPARATOR, "no boundary suffix found")
    return text[: m.start(1)].rstrip(), decode_boundary(m.group(1))
