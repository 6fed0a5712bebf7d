"""
Residuals of the fourth-order equation on an x-grid.

Euler-Lagrange form: with w_ij = J psi'(J) u^{ij} = psi'(J) cof(u)_ij,

    sum_ij d^2 w_ij / dx_i dx_j

by nested second differences. Harmonic form: the divergence of the flux
of ``src.verify.flux`` divided by ``f_scale``. The first is reported on
nodes at least two away from the edge, the second FLUX_MARGIN away.
"""
from typing import Optional, Tuple

import numpy as np
from loguru import logger

from src.core import stencils
from src.core.config import settings
from src.potential.models import JoyceData, Potential
from src.verify.flux import FLUX_MARGIN, compute_v_field, divergence, fd_hessian, require_convex
from src.verify.models import ResidualReport, XGridSolution

Box = Tuple[float, float, float, float]
RATIO_BAND = (0.5, 2.0)
# round-off in u reaches a depth-k residual as about GAIN * eps * |u| / h^k
ROUNDOFF_GAIN = 1e4


def residual_mask(sol: XGridSolution, box: Optional[Box] = None, margin: int = 2) -> np.ndarray:
    mask = stencils.margin_mask(sol.grid.shape, margin)
    if box is not None:
        X1, X2 = sol.grid.mesh()
        mask &= stencils.box_mask(X1, X2, box)
    return mask


def roundoff_floor(sol: XGridSolution, mask: np.ndarray, depth: int) -> float:
    """Residual size that amplified round-off in u alone can produce on this grid."""
    h = max(sol.grid.h1, sol.grid.h2)
    scale = float(np.max(np.abs(sol.u[mask]))) if mask.any() else 0.0
    return ROUNDOFF_GAIN * float(np.finfo(float).eps) * scale / h**depth


def _single_level(
    name: str,
    sol: XGridSolution,
    field: np.ndarray,
    tol: float,
    box: Optional[Box],
    margin: int = 2,
    depth: Optional[int] = None,
) -> ResidualReport:
    g = sol.grid
    mask = residual_mask(sol, box, margin)
    n = stencils.norms(field, g.h1, g.h2, mask)
    noise = [] if depth is None else [roundoff_floor(sol, mask, depth)]
    return ResidualReport(
        name=name,
        grids=[g.shape],
        h=[max(g.h1, g.h2)],
        linf=[n.linf],
        l2=[n.l2],
        tolerance=tol,
        passed=n.linf <= tol,
        noise=noise,
        field=field,
    )


def euler_lagrange_field(sol: XGridSolution, pot: Potential) -> np.ndarray:
    g = sol.grid
    hess = fd_hessian(sol.u, g)
    require_convex(hess, margin=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        psi1 = np.asarray(pot.psi1(hess.J), dtype=float)
    psi1 = np.where(hess.positive, psi1, np.nan)
    w11 = psi1 * hess.u22
    w12 = -psi1 * hess.u12
    w22 = psi1 * hess.u11
    return stencils.d2(w11, g.h1, 0) + 2.0 * stencils.mixed(w12, g.h1, g.h2) + stencils.d2(w22, g.h2, 1)


def euler_lagrange_residual(
    sol: XGridSolution,
    pot: Potential,
    tol: Optional[float] = None,
    box: Optional[Box] = None,
) -> ResidualReport:
    tol = settings().tol_residual if tol is None else tol
    report = _single_level(f"euler-lagrange[{pot.name}]", sol, euler_lagrange_field(sol, pot), tol, box, depth=4)
    logger.debug(f"[verify] EL residual on {sol.grid.n1}x{sol.grid.n2}: Linf={report.finest_linf:.3e}")
    return report


def flux_field(sol: XGridSolution, jd: JoyceData) -> np.ndarray:
    return divergence(compute_v_field(sol, jd)) / jd.f_scale


def flux_residual(
    sol: XGridSolution,
    jd: JoyceData,
    tol: Optional[float] = None,
    box: Optional[Box] = None,
    pot: Optional[Potential] = None,
) -> ResidualReport:
    """
    Divergence of the harmonic flux. With ``pot`` the Euler-Lagrange
    residual on the same grid is computed too and ``ratio`` holds the
    quotient of the two L2 norms; the ratio must fall in RATIO_BAND
    unless the Euler-Lagrange residual is already within tolerance.
    """
    tol = settings().tol_residual if tol is None else tol
    report = _single_level(f"flux[{jd.name}]", sol, flux_field(sol, jd), tol, box, FLUX_MARGIN)
    if pot is None:
        return report
    # compared on the same nodes
    el = _single_level(f"euler-lagrange[{pot.name}]", sol, euler_lagrange_field(sol, pot), tol, box, FLUX_MARGIN)
    ratio = report.finest_l2 / el.finest_l2 if el.finest_l2 > 0.0 else None
    in_band = ratio is not None and RATIO_BAND[0] <= ratio <= RATIO_BAND[1]
    notes = []
    if not in_band:
        notes.append("ratio outside band; accepted only while both residuals are within tolerance")
    passed = report.passed and (in_band or el.passed)
    return report.model_copy(update={"ratio": ratio, "passed": passed, "notes": notes})
