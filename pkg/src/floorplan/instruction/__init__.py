from .checker import ConstraintReport, ConstraintVerdict, check_constraints, match_constraints
from .generator import format_number, generate, generate_sections
from .model import (
    CompassRegion,
    Relation,
    RelationKind,
    RoomConstraint,
    RoomRef,
    constraints_from_json,
    constraints_to_json,
)
from .parser import ParseResult, parse, parse_document, split_sentences
from .regions import plan_enclosure, region_cell, region_of

__all__ = [
    "CompassRegion",
    "ConstraintReport",
    "ConstraintVerdict",
    "ParseResult",
    "Relation",
    "RelationKind",
    "RoomConstraint",
    "RoomRef",
    "check_constraints",
    "constraints_from_json",
    "constraints_to_json",
    "format_number",
    "generate",
    "generate_sections",
    "match_constraints",
    "parse",
    "parse_document",
    "plan_enclosure",
    "region_cell",
    "region_of",
    "split_sentences",
]
