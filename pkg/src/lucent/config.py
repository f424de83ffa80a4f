"""Analysis knobs shared by the command-line surface."""

from __future__ import annotations

from dataclasses import dataclass

from .reachability import DEFAULT_STATE_CAP
from .structure import DEFAULT_ENUM_CAP


@dataclass(frozen=True)
class AnalysisConfig:
    state_cap: int = DEFAULT_STATE_CAP
    enum_cap: int = DEFAULT_ENUM_CAP
    allow_place_free_cp: bool = False
    fmt: str = "text"  # "text" | "json" | "dot"

    def __post_init__(self):
        if self.state_cap <= 0 or self.enum_cap <= 0:
            raise ValueError("caps must be positive")
        if self.fmt not in ("text", "json", "dot"):
            raise ValueError(f"unknown output format {self.fmt!r}")
