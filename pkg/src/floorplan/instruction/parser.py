"""Rule-based extraction of room constraints from instruction documents.

Each sentence is reduced to a subject room plus attributes (region, area,
aspect ratio, sides, relations). The subject is the first room mention,
except that a leading pronoun ("It", "This room") binds to the previous
subject and a sentence opening with a relation phrase ("Next to the kitchen
is the bathroom") takes its last mention. Sentences without any room mention
attach their attributes to the previous subject.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from ..geometry import RoomType
from . import lexicon as lx
from .model import ORDINALS, Relation, RelationKind, RoomConstraint


@dataclass
class ParseResult:
    constraints: list[RoomConstraint]
    sentences: int = 0
    skipped: int = 0
    skipped_sentences: list[str] = field(default_factory=list)


@dataclass
class _Mention:
    start: int
    end: int
    room_type: RoomType
    ordinal: Optional[str]


def split_sentences(text: str) -> list[str]:
    return [s.strip() for s in lx.SENTENCE_SPLIT_RE.split(text) if s and s.strip()]


def _blank(text: str, span: tuple[int, int]) -> str:
    return text[: span[0]] + " " * (span[1] - span[0]) + text[span[1] :]


def _extract_numbers(text: str) -> tuple[dict[str, float], str]:
    """Pull area/ratio/side values out of ``text`` and blank their spans."""
    found: dict[str, float] = {}

    def take(key: str, pattern: re.Pattern, convert=lambda m: float(m.group(1))) -> None:
        nonlocal text
        m = pattern.search(text)
        if m is None:
            return
        value = convert(m)
        if value > 0 and key not in found:
            found[key] = value
        text = _blank(text, m.span())

    take("area_sqft", lx.AREA_RE)
    take("area_sqft", lx.AREA_M2_RE, lambda m: float(m.group(1)) * lx.SQ_METERS_TO_SQFT)

    def ratio(m: re.Match) -> float:
        a = float(m.group(1))
        b = float(m.group(2)) if m.group(2) else 1.0
        return a / b if b > 0 else 0.0

    take("aspect_ratio", lx.RATIO_RE, ratio)
    m = lx.DIMS_RE.search(text)
    if m is not None:
        found.setdefault("width_ft", float(m.group(1)))
        found.setdefault("length_ft", float(m.group(2)))
        text = _blank(text, m.span())
    for pattern in lx.WIDTH_RES:
        take("width_ft", pattern)
    for pattern in lx.LENGTH_RES:
        take("length_ft", pattern)
    return {k: v for k, v in found.items() if v > 0}, text


def _mentions(text: str) -> list[_Mention]:
    out = []
    for m in lx.MENTION_RE.finditer(text):
        group = next(g for g in lx.MENTION_TYPES if m.group(g))
        out.append(_Mention(m.start(), m.end(), lx.MENTION_TYPES[group], lx.normalize_ordinal(m.group("ord"))))
    return out


def _region(text: str):
    text = lx.AXIS_RE.sub(lambda m: " " * len(m.group(0)), text)
    for m in lx.COMPASS_RE.finditer(text):
        if lx.RELATIVE_TAIL_RE.match(text, m.end()):
            continue
        return lx.compass_region(m)
    return None


def _relation_spans(text: str) -> list[tuple[int, int, RelationKind]]:
    spans = [(m.start(), m.end(), kind) for kind, pat in lx.RELATION_RES for m in pat.finditer(text)]
    return sorted(spans)


class _Registry:
    """Room instances seen so far, keyed by (type, tag)."""

    def __init__(self) -> None:
        self.constraints: list[RoomConstraint] = []
        self._recent: dict[RoomType, RoomConstraint] = {}

    def _of_type(self, t: RoomType) -> list[RoomConstraint]:
        return [c for c in self.constraints if c.room_type is t]

    def _create(self, t: RoomType, tag: Optional[str]) -> RoomConstraint:
        c = RoomConstraint(t, tag)
        self.constraints.append(c)
        return c

    def resolve(self, mention: _Mention) -> RoomConstraint:
        t, ordinal = mention.room_type, mention.ordinal
        same = self._of_type(t)
        if ordinal == "other":
            # "the other bathroom": an existing instance besides the current one
            others = [c for c in same if c is not self._recent.get(t)]
            ordinal = None if others else "another"
            if others:
                self._recent[t] = others[-1]
        if ordinal == "another":
            self._promote_untagged(same)
            used = {c.instance_tag for c in same}
            tag = next((o for o in ORDINALS if o not in used), None)
            c = self._create(t, tag)
        elif ordinal is not None:
            c = next((c for c in same if c.instance_tag == ordinal), None)
            if c is None:
                untagged = [c for c in same if c.instance_tag is None]
                if ordinal == "first" and len(untagged) == 1:
                    c = untagged[0]
                    c.instance_tag = "first"
                else:
                    self._promote_untagged(same)
                    c = self._create(t, ordinal)
        else:
            c = self._recent.get(t) or self._create(t, None)
        self._recent[t] = c
        return c

    @staticmethod
    def _promote_untagged(same: list[RoomConstraint]) -> None:
        untagged = [c for c in same if c.instance_tag is None]
        if len(untagged) == 1 and all(c.instance_tag != "first" for c in same):
            untagged[0].instance_tag = "first"


def parse_document(text: str) -> ParseResult:
    registry = _Registry()
    sentences = split_sentences(text)
    result = ParseResult(registry.constraints, sentences=len(sentences))
    last: Optional[RoomConstraint] = None
    pending: list[tuple[RoomConstraint, RelationKind, tuple[RoomConstraint, ...]]] = []
    for sentence in sentences:
        low = sentence.lower()
        numbers, masked = _extract_numbers(low)
        mentions = _mentions(masked)
        relations = _relation_spans(masked)
        region = _region(masked)
        has_attrs = bool(numbers) or region is not None

        subject_idx: Optional[int] = None
        if lx.PRONOUN_START_RE.match(masked) and last is not None:
            subject = last
        elif mentions:
            if relations and relations[0][0] < mentions[0].start:
                subject_idx = len(mentions) - 1
            else:
                subject_idx = 0
            subject = registry.resolve(mentions[subject_idx])
        elif has_attrs and last is not None:
            subject = last
        else:
            result.skipped += 1
            result.skipped_sentences.append(sentence)
            continue

        for i, (start, end, kind) in enumerate(relations):
            stop = relations[i + 1][0] if i + 1 < len(relations) else len(masked)
            targets = [m for j, m in enumerate(mentions) if j != subject_idx and end <= m.start < stop]
            resolved = [registry.resolve(m) for m in targets]
            resolved = [c for c in resolved if c is not subject]
            if kind is RelationKind.BETWEEN:
                if len(resolved) >= 2:
                    pending.append((subject, kind, (resolved[0], resolved[1])))
            elif kind is RelationKind.NEXT_TO:
                pending.extend((subject, kind, (c,)) for c in resolved)
            elif resolved:
                pending.append((subject, kind, (resolved[0],)))

        if region is not None:
            subject.region = region
        for key, value in numbers.items():
            setattr(subject, key, value)
        last = subject

    # tags may have been promoted after a relation was read, so refs are taken now
    for subject, kind, targets in pending:
        rel = Relation(kind, tuple(c.ref for c in targets))
        if rel not in subject.relations:
            subject.relations.append(rel)
    return result


def parse(text: str) -> list[RoomConstraint]:
    return parse_document(text).constraints
