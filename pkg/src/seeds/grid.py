"""
Rectangular (H, r) grid. Arrays on it have shape (nH, nr): axis 0 is H,
axis 1 is r, so the row-major flattening has r fastest.
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.core.errors import ConfigError, DomainError


@dataclass(frozen=True)
class Grid2:
    H_range: Tuple[float, float]
    r_range: Tuple[float, float]
    nH: int
    nr: int

    def __post_init__(self):
        H0, H1 = self.H_range
        r0, r1 = self.r_range
        if self.nH < 3 or self.nr < 3:
            raise ConfigError(f"Grid needs at least 3x3 nodes, got {self.nH}x{self.nr}")
        if not (H1 > H0 and r1 > r0):
            raise ConfigError(f"Empty grid rectangle H={self.H_range}, r={self.r_range}")

    @classmethod
    def from_domain(cls, domain: Tuple[float, float, float, float], shape: Tuple[int, int]) -> "Grid2":
        H0, H1, r0, r1 = domain
        return cls(H_range=(float(H0), float(H1)), r_range=(float(r0), float(r1)), nH=int(shape[0]), nr=int(shape[1]))

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.nH, self.nr)

    @property
    def hH(self) -> float:
        return (self.H_range[1] - self.H_range[0]) / (self.nH - 1)

    @property
    def hr(self) -> float:
        return (self.r_range[1] - self.r_range[0]) / (self.nr - 1)

    @property
    def H(self) -> np.ndarray:
        return np.linspace(self.H_range[0], self.H_range[1], self.nH)

    @property
    def r(self) -> np.ndarray:
        return np.linspace(self.r_range[0], self.r_range[1], self.nr)

    @property
    def domain(self) -> Tuple[float, float, float, float]:
        return (*self.H_range, *self.r_range)

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.H, self.r, indexing="ij")

    def node(self, i: int, j: int) -> Tuple[float, float]:
        return (float(self.H[i]), float(self.r[j]))

    def nearest(self, H: float, r: float) -> Tuple[int, int]:
        """Index of the node nearest to (H, r); raises if the point is off the grid."""
        H0, H1 = self.H_range
        r0, r1 = self.r_range
        tol = 1e-12 * max(1.0, abs(H1 - H0), abs(r1 - r0))
        if not (H0 - tol <= H <= H1 + tol and r0 - tol <= r <= r1 + tol):
            raise DomainError(f"Point (H={H}, r={r}) is outside the grid {self.H_range} x {self.r_range}")
        i = int(np.clip(np.rint((H - H0) / self.hH), 0, self.nH - 1))
        j = int(np.clip(np.rint((r - r0) / self.hr), 0, self.nr - 1))
        return (i, j)

    def check_inside(self, jd) -> None:
        """The closed r-range must lie strictly inside the interval I of ``jd``."""
        lo, hi = jd.interval
        r0, r1 = self.r_range
        if not (r0 > lo and r1 < hi):
            raise DomainError(f"r-range [{r0}, {r1}] not strictly inside I = ({lo}, {hi}) of {jd.name}")

    def sub(self, i0: int, i1: int, j0: int, j1: int) -> "Grid2":
        """Sub-grid over the inclusive index ranges [i0, i1] x [j0, j1]."""
        H, r = self.H, self.r
        return Grid2(H_range=(float(H[i0]), float(H[i1])), r_range=(float(r[j0]), float(r[j1])), nH=i1 - i0 + 1, nr=j1 - j0 + 1)

    def refine(self, factor: int = 2) -> "Grid2":
        return Grid2(
            H_range=self.H_range,
            r_range=self.r_range,
            nH=(self.nH - 1) * factor + 1,
            nr=(self.nr - 1) * factor + 1,
        )
