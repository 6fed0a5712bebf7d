"""
Discrete surfaces Z: Grid2 -> R^3 integrated from a first-order system
dZ = a d(l1) + b d(l2).
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from loguru import logger
from scipy.integrate import trapezoid

from src.core.integrate import two_path_integral
from src.seeds.grid import Grid2

ZERO_AREA = 1e-12


def quad_faces(shape: Tuple[int, int]) -> np.ndarray:
    """Grid quads as 0-based vertex indices, vertices ordered row-major with r fastest."""
    n0, n1 = shape
    i, j = np.meshgrid(np.arange(n0 - 1), np.arange(n1 - 1), indexing="ij")
    k = (i * n1 + j).ravel()
    return np.column_stack([k, k + n1, k + n1 + 1, k + 1])


@dataclass(frozen=True)
class Surface:
    grid: Grid2
    Z: np.ndarray                # (nH, nr, 3)
    faces: np.ndarray            # (m, 4)
    base: Tuple[int, int]
    discrepancy: float           # two-path difference
    consistency: float           # mixed-partial defect of the system, L-infinity
    area: float
    name: str = ""

    @property
    def degenerate(self) -> bool:
        return self.area <= ZERO_AREA * max(1.0, float(np.max(np.abs(self.Z))) ** 2)

    @property
    def vertices(self) -> np.ndarray:
        return self.Z.reshape(-1, 3)

    def aligned_difference(self, other: np.ndarray) -> Tuple[np.ndarray, float]:
        """Best-fit constant offset (mean difference) and the remaining L-infinity."""
        diff = self.Z - other
        offset = diff.reshape(-1, 3).mean(axis=0)
        return offset, float(np.max(np.abs(diff - offset)))


def integrate_surface(
    grid: Grid2,
    a: np.ndarray,
    b: np.ndarray,
    a_d0: Optional[np.ndarray],
    b_d1: Optional[np.ndarray],
    consistency: np.ndarray,
    base: Optional[Tuple[int, int]] = None,
    name: str = "",
) -> Surface:
    """Componentwise two-path integration with Z(base) = 0; ``consistency`` is da/dl2 - db/dl1."""
    base = base or (0, 0)
    Z = np.empty(a.shape)
    discrepancy = 0.0
    for k in range(3):
        path = two_path_integral(
            a[..., k], b[..., k], grid.hH, grid.hr, base,
            None if a_d0 is None else a_d0[..., k],
            None if b_d1 is None else b_d1[..., k],
        )
        Z[..., k] = path.values
        discrepancy = max(discrepancy, path.discrepancy)
    density = np.linalg.norm(np.cross(a, b), axis=-1)
    area = float(trapezoid(trapezoid(density, dx=grid.hr, axis=1), dx=grid.hH, axis=0))
    surface = Surface(
        grid=grid,
        Z=Z,
        faces=quad_faces(grid.shape),
        base=base,
        discrepancy=discrepancy,
        consistency=float(np.max(np.abs(consistency))),
        area=area,
        name=name,
    )
    if surface.degenerate:
        logger.warning(f"[affine] Surface '{name}' has zero area: the differential is rank deficient")
    logger.info(
        f"[affine] Integrated surface '{name}' on {grid.nH}x{grid.nr}: "
        f"area {area:.6g}, path discrepancy {discrepancy:.3e}, consistency {surface.consistency:.3e}"
    )
    return surface
