"""Configuration records shared by the instruction, solver and CLI layers."""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Optional

CONFIG_ENV_VAR = "FLOORPLAN_CONFIG"
DEFAULT_CONFIG_PATH = Path("floorplan.json")


@dataclass(frozen=True)
class ScaleConfig:
    feet_per_pixel: float = 0.25

    def __post_init__(self) -> None:
        if not (self.feet_per_pixel > 0 and math.isfinite(self.feet_per_pixel)):
            raise ValueError("feet_per_pixel must be a positive finite number")


@dataclass(frozen=True)
class ToleranceConfig:
    area_rel: float = 0.25
    ratio_rel: float = 0.25
    adjacency_gap: int = 2

    def __post_init__(self) -> None:
        if self.area_rel < 0 or self.ratio_rel < 0 or self.adjacency_gap < 0:
            raise ValueError("tolerances must be nonnegative")


@dataclass(frozen=True)
class CostWeights:
    w_region: float = 2.0
    w_area: float = 1.0
    w_ratio: float = 0.5
    w_relation: float = 3.0
    w_overlap: float = 2.0
    w_outside: float = 3.0
    w_coverage: float = 2.0

    def __post_init__(self) -> None:
        values = [getattr(self, f.name) for f in fields(self)]
        if any(not math.isfinite(v) or v < 0 for v in values):
            raise ValueError("cost weights must be finite and nonnegative")
        if not any(v > 0 for v in values):
            raise ValueError("at least one cost weight must be positive")

    @classmethod
    def parse(cls, text: str) -> "CostWeights":
        """Build from ``"w_area=1,w_relation=4"``; unnamed weights keep defaults."""
        kwargs = {}
        for item in filter(None, (p.strip() for p in text.split(","))):
            key, _, value = item.partition("=")
            key = key.strip()
            if not key.startswith("w_"):
                key = "w_" + key
            if key not in {f.name for f in fields(cls)}:
                raise ValueError(f"unknown weight {key!r}")
            kwargs[key] = float(value)
        return cls(**kwargs)


@dataclass(frozen=True)
class SolverConfig:
    seed: int = 0
    iterations: int = 3000
    initial_temperature: float = 0.05
    cooling: float = 0.999
    restarts: int = 2

    def __post_init__(self) -> None:
        if self.iterations < 1 or self.restarts < 1:
            raise ValueError("iterations and restarts must be >= 1")
        if not self.initial_temperature > 0:
            raise ValueError("initial_temperature must be positive")
        if not 0 < self.cooling < 1:
            raise ValueError("cooling must lie in (0, 1)")


@dataclass(frozen=True)
class Settings:
    """Everything a config file can set."""

    scale: ScaleConfig = ScaleConfig()
    tolerance: ToleranceConfig = ToleranceConfig()
    weights: CostWeights = CostWeights()
    solver: SolverConfig = SolverConfig()

    def to_json(self) -> dict[str, Any]:
        return asdict(self)


def config_path() -> Path:
    return Path(os.environ.get(CONFIG_ENV_VAR, DEFAULT_CONFIG_PATH))


def load_settings(path: Optional[Path] = None) -> Settings:
    """Read a JSON config with optional ``scale``/``tolerance``/``weights``/``solver`` sections.

    A missing file at the default location yields defaults; an explicitly
    named missing file is an error.
    """
    explicit = path is not None or CONFIG_ENV_VAR in os.environ
    path = Path(path) if path is not None else config_path()
    if not path.exists():
        if explicit:
            raise FileNotFoundError(f"config file {path} not found")
        return Settings()
    data = json.loads(path.read_text(encoding="utf-8"))
    settings = Settings()
    sections = {"scale": ScaleConfig, "tolerance": ToleranceConfig, "weights": CostWeights, "solver": SolverConfig}
    for key in data:
        if key not in sections:
            raise ValueError(f"unknown config section {key!r}")
    for key, cls in sections.items():
        if key in data:
            settings = replace(settings, **{key: cls(**data[key])})
    return settings
