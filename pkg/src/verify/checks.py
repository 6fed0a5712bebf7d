"""
Convexity and Legendre-gradient checks.
"""
from typing import List, Optional, Tuple, Union

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field

from src.core import stencils
from src.core.config import settings
from src.construct.chart import Chart
from src.seeds.fields import JetSource
from src.verify.flux import fd_hessian
from src.verify.models import XGridSolution


class ConvexityReport(BaseModel):
    convex: bool
    nonconvex_count: int
    nonconvex_nodes: List[Tuple[int, int]] = Field(default_factory=list)
    gradient_defect: Optional[float] = None        # |grad u - xi| on x-grids
    chart_identity_defect: Optional[float] = None  # |du - xi . dx| from the chart jets
    fd_identity_defect: Optional[float] = None     # the same with finite differences of the grid values
    tolerance: float
    passed: bool


def _positive_definite(m11: np.ndarray, m12: np.ndarray, m22: np.ndarray) -> np.ndarray:
    scale = np.abs(m11) + np.abs(m22) + 2.0 * np.abs(m12)
    return (m11 > 1e-12 * scale) & (m11 * m22 - m12 * m12 > 1e-12 * scale**2)


def _solution_check(sol: XGridSolution, tol: float, fd_tol: float) -> ConvexityReport:
    g = sol.grid
    tol = max(tol, fd_tol * max(g.h1, g.h2) ** 2)
    hess = fd_hessian(sol.u, g)
    interior = stencils.margin_mask(g.shape, 1)
    bad = interior & ~hess.positive
    gradient_defect = None
    if sol.has_gradient:
        d1, d2 = stencils.gradient(sol.u, g.h1, g.h2)
        gradient_defect = float(max(np.max(np.abs(d1 - sol.xi1)[interior]), np.max(np.abs(d2 - sol.xi2)[interior])))
    convex = not np.any(bad)
    return ConvexityReport(
        convex=convex,
        nonconvex_count=int(bad.sum()),
        nonconvex_nodes=[tuple(int(v) for v in n) for n in np.argwhere(bad)[:20]],
        gradient_defect=gradient_defect,
        tolerance=tol,
        passed=convex and (gradient_defect is None or gradient_defect <= tol),
    )


def _chart_check(chart: Chart, tol: float, fd_tol: float) -> ConvexityReport:
    if chart.u.jet_source is JetSource.FINITE_DIFFERENCE:
        tol = max(tol, fd_tol * max(chart.grid.hH, chart.grid.hr) ** 2)
    hess = chart.B @ np.linalg.inv(chart.A)
    sym12 = 0.5 * (hess[..., 0, 1] + hess[..., 1, 0])
    bad = ~_positive_definite(hess[..., 0, 0], sym12, hess[..., 1, 1])

    xi1, xi2 = chart.xi1.values, chart.xi2.values
    uj = chart.u.require_jet()
    identity = max(
        float(np.max(np.abs(uj.dH - (xi1 * chart.A[..., 0, 0] + xi2 * chart.A[..., 1, 0])))),
        float(np.max(np.abs(uj.dr - (xi1 * chart.A[..., 0, 1] + xi2 * chart.A[..., 1, 1])))),
    )
    u_fd = chart.u.with_fd_jet().jet
    x1_fd = chart.x1.with_fd_jet().jet
    x2_fd = chart.x2.with_fd_jet().jet
    fd_identity = max(
        float(np.max(np.abs(u_fd.dH - (xi1 * x1_fd.dH + xi2 * x2_fd.dH)))),
        float(np.max(np.abs(u_fd.dr - (xi1 * x1_fd.dr + xi2 * x2_fd.dr)))),
    )
    convex = not np.any(bad)
    return ConvexityReport(
        convex=convex,
        nonconvex_count=int(bad.sum()),
        nonconvex_nodes=[tuple(int(v) for v in n) for n in np.argwhere(bad)[:20]],
        chart_identity_defect=identity,
        fd_identity_defect=fd_identity,
        tolerance=tol,
        passed=convex and identity <= tol,
    )


def convexity_legendre_check(
    obj: Union[XGridSolution, Chart], tol: Optional[float] = None, fd_tol: Optional[float] = None
) -> ConvexityReport:
    """
    Positive definiteness of the Hessian and du = xi . dx.

    Exact jets are held to ``tol``. Where a finite-difference jet enters
    (the gradient on x-grids, a chart loaded from values) the allowed
    defect is max(tol, fd_tol * h^2).
    """
    tol = settings().tol_identity if tol is None else tol
    fd_tol = settings().tol_identity_h2 if fd_tol is None else fd_tol
    if isinstance(obj, Chart):
        report = _chart_check(obj, tol, fd_tol)
    else:
        report = _solution_check(obj, tol, fd_tol)
    if not report.convex:
        logger.warning(f"[verify] Convexity fails at {report.nonconvex_count} nodes")
    return report
