"""
Data models for x-space solutions and residual reports.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.core.errors import ConfigError


@dataclass(frozen=True)
class XGrid:
    """Rectangular grid in (x1, x2); arrays have shape (n1, n2)."""
    x1_range: Tuple[float, float]
    x2_range: Tuple[float, float]
    n1: int
    n2: int

    def __post_init__(self):
        if self.n1 < 3 or self.n2 < 3:
            raise ConfigError(f"x-grid needs at least 3x3 nodes, got {self.n1}x{self.n2}")
        if not (self.x1_range[1] > self.x1_range[0] and self.x2_range[1] > self.x2_range[0]):
            raise ConfigError(f"Empty x-rectangle {self.x1_range} x {self.x2_range}")

    @classmethod
    def from_box(cls, box: Tuple[float, float, float, float], n1: int, n2: Optional[int] = None) -> "XGrid":
        return cls((float(box[0]), float(box[1])), (float(box[2]), float(box[3])), int(n1), int(n2 or n1))

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.n1, self.n2)

    @property
    def h1(self) -> float:
        return (self.x1_range[1] - self.x1_range[0]) / (self.n1 - 1)

    @property
    def h2(self) -> float:
        return (self.x2_range[1] - self.x2_range[0]) / (self.n2 - 1)

    @property
    def x1(self) -> np.ndarray:
        return np.linspace(self.x1_range[0], self.x1_range[1], self.n1)

    @property
    def x2(self) -> np.ndarray:
        return np.linspace(self.x2_range[0], self.x2_range[1], self.n2)

    @property
    def box(self) -> Tuple[float, float, float, float]:
        return (*self.x1_range, *self.x2_range)

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x1, self.x2, indexing="ij")

    def refine(self, factor: int = 2) -> "XGrid":
        return XGrid(self.x1_range, self.x2_range, (self.n1 - 1) * factor + 1, (self.n2 - 1) * factor + 1)


class SolutionProvenance(Enum):
    RESAMPLED = "resampled-from-chart"
    CLOSED_FORM = "closed-form"
    EXTERNAL = "external-file"
    LEGENDRE = "legendre-transform"


@dataclass(frozen=True)
class XGridSolution:
    grid: XGrid
    u: np.ndarray
    provenance: SolutionProvenance
    xi1: Optional[np.ndarray] = None
    xi2: Optional[np.ndarray] = None
    J: Optional[np.ndarray] = None
    H: Optional[np.ndarray] = None       # preimage in the chart, when resampled
    r: Optional[np.ndarray] = None
    name: str = ""
    source: Optional[Any] = field(default=None, repr=False, compare=False)  # chart it was resampled from

    def __post_init__(self):
        if self.u.shape != self.grid.shape:
            raise ConfigError(f"u has shape {self.u.shape}, grid is {self.grid.shape}")
        if not np.all(np.isfinite(self.u)):
            raise ConfigError(f"u is not finite everywhere on '{self.name}'")

    @property
    def has_gradient(self) -> bool:
        return self.xi1 is not None and self.xi2 is not None


class ResidualReport(BaseModel):
    """Norms of one residual across one or more grid levels."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    name: str
    grids: List[Tuple[int, int]]
    h: List[float]
    linf: List[float]
    l2: List[float]
    order: Optional[float] = None
    tolerance: float
    threshold: Optional[float] = None
    passed: bool
    ratio: Optional[float] = None
    # per-level size of amplified round-off; empty when not estimated
    noise: List[float] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)
    field: Optional[Any] = Field(default=None, exclude=True)

    @property
    def finest_linf(self) -> float:
        return self.linf[-1]

    @property
    def finest_l2(self) -> float:
        return self.l2[-1]
