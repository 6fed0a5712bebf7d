"""
Pulling rectangular targets back through a map sampled on an x-grid.

The forward map c = (c0(x), c1(x)) is a pair of bicubic splines; each target
is solved for by Newton iteration seeded from the nearest sampled node.
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from loguru import logger
from scipy.interpolate import RectBivariateSpline
from scipy.spatial import cKDTree

from src.core.config import settings
from src.core.errors import NewtonError, OutsideImageError
from src.verify.models import XGrid


@dataclass(frozen=True)
class Preimage:
    x1: np.ndarray
    x2: np.ndarray
    iterations: int


def spline(grid: XGrid, values: np.ndarray) -> RectBivariateSpline:
    return RectBivariateSpline(grid.x1, grid.x2, values, kx=3, ky=3, s=0)


def _flagged(mask: np.ndarray, shape: Tuple[int, ...]):
    return [tuple(int(v) for v in np.unravel_index(k, shape)) for k in np.flatnonzero(mask)]


def invert_sampled_map(
    grid: XGrid,
    c0: np.ndarray,
    c1: np.ndarray,
    t0: np.ndarray,
    t1: np.ndarray,
    tol: Optional[float] = None,
    maxiter: Optional[int] = None,
    label: str = "map",
) -> Preimage:
    """Solve (c0, c1)(x) = (t0, t1) for x inside ``grid``."""
    tol = settings().tol_newton if tol is None else tol
    maxiter = settings().newton_maxiter if maxiter is None else maxiter
    shape = np.shape(t0)
    targets = np.column_stack([np.ravel(t0), np.ravel(t1)])
    s0, s1 = spline(grid, c0), spline(grid, c1)

    X1, X2 = grid.mesh()
    # Nearest neighbour in coordinates normalised by the image extent.
    scale = np.array([max(np.ptp(c0), 1e-300), max(np.ptp(c1), 1e-300)])
    tree = cKDTree(np.column_stack([c0.ravel(), c1.ravel()]) / scale)
    _, idx = tree.query(targets / scale)
    x1 = X1.ravel()[idx].copy()
    x2 = X2.ravel()[idx].copy()

    lo1, hi1 = grid.x1_range
    lo2, hi2 = grid.x2_range
    extent = np.array([hi1 - lo1, hi2 - lo2])
    for it in range(maxiter):
        res = np.column_stack([s0.ev(x1, x2), s1.ev(x1, x2)]) - targets
        jac = np.empty((x1.size, 2, 2))
        jac[:, 0, 0], jac[:, 0, 1] = s0.ev(x1, x2, dx=1), s0.ev(x1, x2, dy=1)
        jac[:, 1, 0], jac[:, 1, 1] = s1.ev(x1, x2, dx=1), s1.ev(x1, x2, dy=1)
        step = np.linalg.solve(jac, res[..., None])[..., 0]
        new1 = np.clip(x1 - step[:, 0], lo1, hi1)
        new2 = np.clip(x2 - step[:, 1], lo2, hi2)
        # moves after clipping: targets off the image settle on the boundary
        size = np.max(np.abs(np.column_stack([new1 - x1, new2 - x2])) / extent, axis=1)
        x1, x2 = new1, new2
        if np.all(size <= tol):
            logger.debug(f"[inverse] Inverting {label}: Newton converged in {it + 1} iterations")
            break
    else:
        bad = size > tol
        raise NewtonError(
            f"Inverting {label}: Newton did not converge at {int(bad.sum())} targets within {maxiter} iterations",
            nodes=_flagged(bad, shape),
        )

    res = np.hypot(s0.ev(x1, x2) - targets[:, 0], s1.ev(x1, x2) - targets[:, 1])
    miss = res > 1e3 * tol * float(np.max(scale))
    if np.any(miss):
        raise OutsideImageError(f"{int(miss.sum())} targets lie outside the image of the {label}", nodes=_flagged(miss, shape))
    return Preimage(x1=x1.reshape(shape), x2=x2.reshape(shape), iterations=it + 1)
