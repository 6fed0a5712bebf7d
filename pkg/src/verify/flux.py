"""
Finite-difference Hessians of u and the harmonic flux

    v_i = sqrt(J) u^{ij} d r / d x_j,    r = f(J),

whose divergence is the Euler-Lagrange operator written in divergence form.
v uses the canonical r of the Joyce data; dividing by ``f_scale`` gives
the flux of the normalization f' = t^{1/2} psi''.
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.core import stencils
from src.core.errors import NonConvexError
from src.potential.joyce import f_of_J
from src.potential.models import JoyceData
from src.verify.models import XGrid, XGridSolution

# div v nests three differences (Hessian, grad r, div); nodes closer to an
# edge than this carry first-order errors
FLUX_MARGIN = 3


@dataclass(frozen=True)
class FDHessian:
    u11: np.ndarray
    u12: np.ndarray
    u22: np.ndarray
    J: np.ndarray
    positive: np.ndarray   # leading minors positive


@dataclass(frozen=True)
class VField:
    grid: XGrid
    v1: np.ndarray
    v2: np.ndarray
    r: np.ndarray
    f_scale: float


def fd_hessian(u: np.ndarray, grid: XGrid) -> FDHessian:
    u11, u12, u22 = stencils.hessian(u, grid.h1, grid.h2)
    J = u11 * u22 - u12 * u12
    scale = np.abs(u11) + np.abs(u22) + 2.0 * np.abs(u12)
    positive = (u11 > 1e-12 * scale) & (J > 1e-12 * scale**2)
    return FDHessian(u11=u11, u12=u12, u22=u22, J=J, positive=positive)


def require_convex(hess: FDHessian, margin: int = 1) -> None:
    """Abort with node locations when the Hessian is not positive definite."""
    mask = stencils.margin_mask(hess.J.shape, margin)
    bad = mask & ~hess.positive
    if np.any(bad):
        raise NonConvexError(
            f"Hessian of u is not positive definite at {int(bad.sum())} interior nodes",
            nodes=[tuple(n) for n in np.argwhere(bad)],
        )


def compute_v_field(sol: XGridSolution, jd: JoyceData) -> VField:
    grid = sol.grid
    hess = fd_hessian(sol.u, grid)
    require_convex(hess, margin=0)
    J = hess.J
    r = f_of_J(jd, J)
    r1, r2 = stencils.gradient(r, grid.h1, grid.h2)
    sJ = np.sqrt(J)
    inv11, inv12, inv22 = hess.u22 / J, -hess.u12 / J, hess.u11 / J
    v1 = sJ * (inv11 * r1 + inv12 * r2)
    v2 = sJ * (inv12 * r1 + inv22 * r2)
    return VField(grid=grid, v1=v1, v2=v2, r=r, f_scale=jd.f_scale)


def divergence(v: VField) -> np.ndarray:
    return stencils.d1(v.v1, v.grid.h1, 0) + stencils.d1(v.v2, v.grid.h2, 1)


def max_speed(v: VField) -> float:
    return float(np.max(np.hypot(v.v1, v.v2)))


def flux_scale(v: VField) -> Tuple[float, float]:
    """(max |v|, shortest side of the domain)."""
    g = v.grid
    return max_speed(v), min(g.x1_range[1] - g.x1_range[0], g.x2_range[1] - g.x2_range[0])
