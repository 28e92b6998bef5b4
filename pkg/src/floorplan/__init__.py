"""Floor-plan toolkit: box sequences, boundary encoding, instruction parsing,
a layout solver baseline and IoU scoring on 256x256 label grids."""

from .boundary import BoundarySpec, decompose, reconstruct
from .config import CostWeights, ScaleConfig, Settings, SolverConfig, ToleranceConfig, load_settings
from .geometry import BBox, FloorPlan, GeometryError, Room, RoomType, footprint, make_plan
from .instruction import check_constraints, generate, parse
from .metrics import IoUScores, iou, rasterize, shift_max_iou
from .sequence import decode_boundary, decode_plan, encode_boundary, encode_plan
from .solver import SolverError, cost, solve

__version__ = "0.1.0"

__all__ = [
    "BBox",
    "BoundarySpec",
    "CostWeights",
    "FloorPlan",
    "GeometryError",
    "IoUScores",
    "Room",
    "RoomType",
    "ScaleConfig",
    "Settings",
    "SolverConfig",
    "SolverError",
    "ToleranceConfig",
    "check_constraints",
    "cost",
    "decode_boundary",
    "decode_plan",
    "decompose",
    "encode_boundary",
    "encode_plan",
    "footprint",
    "generate",
    "iou",
    "load_settings",
    "make_plan",
    "parse",
    "rasterize",
    "reconstruct",
    "shift_max_iou",
    "solve",
]
