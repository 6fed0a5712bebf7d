"""
Legendre transform of a gridded convex solution.

u*(xi) = xi . x - u(x) at the x with grad u(x) = xi. Solutions resampled
from a chart with closed-form seeds are transformed through the chart
evaluator (Newton in (H, r) on xi(H, r) = target); all others through the
bicubic spline of u (Newton on the spline gradient).
"""
from typing import Optional

import numpy as np
from loguru import logger
from scipy.spatial import cKDTree

from src.construct.chart import Chart
from src.construct.evaluator import ChartEvaluator
from src.core import stencils
from src.core.config import settings
from src.core.errors import NewtonError, OutsideImageError
from src.inverse.inversion import invert_sampled_map, spline
from src.verify.flux import fd_hessian, require_convex
from src.verify.models import SolutionProvenance, XGrid, XGridSolution
from src.verify.resample import inscribed_box


def _gradient(sol: XGridSolution):
    if sol.has_gradient:
        return sol.xi1, sol.xi2
    return stencils.gradient(sol.u, sol.grid.h1, sol.grid.h2)


def _through_evaluator(chart: Chart, evaluator: ChartEvaluator, t1: np.ndarray, t2: np.ndarray):
    """(x1, x2, u, J) at the chart points where xi = (t1, t2)."""
    tol, maxiter = settings().tol_newton, settings().newton_maxiter
    grid = chart.grid
    targets = np.column_stack([t1.ravel(), t2.ravel()])
    HH, RR = grid.mesh()
    tree = cKDTree(np.column_stack([chart.xi1.values.ravel(), chart.xi2.values.ravel()]))
    _, idx = tree.query(targets)
    H, r = HH.ravel()[idx].copy(), RR.ravel()[idx].copy()
    lo, hi = grid.r_range
    pad = 0.5 * (hi - lo)
    for it in range(maxiter):
        forms = evaluator.forms(H, r)
        res = np.column_stack([forms.xi1, forms.xi2]) - targets
        step = np.linalg.solve(forms.B, res[..., None])[..., 0]
        H = H - step[:, 0]
        r = np.clip(r - step[:, 1], lo - pad, hi + pad)
        size = np.max(np.abs(step) / (1.0 + np.abs(np.column_stack([H, r]))), axis=1)
        if np.all(size <= tol):
            logger.debug(f"[inverse] Legendre Newton converged in {it + 1} iterations")
            break
    else:
        raise NewtonError(f"Legendre Newton did not converge at {int((size > tol).sum())} targets within {maxiter} iterations")
    eps_H = 1e-9 * (grid.H_range[1] - grid.H_range[0])
    eps_r = 1e-9 * (hi - lo)
    off = (H < grid.H_range[0] - eps_H) | (H > grid.H_range[1] + eps_H) | (r < lo - eps_r) | (r > hi + eps_r)
    if np.any(off):
        raise OutsideImageError(f"{int(off.sum())} targets pull back outside the chart rectangle")
    pot, _ = evaluator.evaluate(H, r)
    shape = t1.shape
    return (pot[:, 0].reshape(shape), pot[:, 1].reshape(shape), pot[:, 2].reshape(shape),
            np.asarray(chart.jd.J(r), dtype=float).reshape(shape))


def legendre_transform_grid(
    sol: XGridSolution,
    target: Optional[XGrid] = None,
    shrink: float = 0.9,
) -> XGridSolution:
    """
    The transform on ``target`` (default: a box inscribed in the image of
    grad u with the solution's node counts). The result carries its own
    gradient (the x preimages) and J* = 1 / J.
    """
    require_convex(fd_hessian(sol.u, sol.grid), margin=1)
    g1, g2 = _gradient(sol)
    if target is None:
        target = XGrid.from_box(inscribed_box(g1, g2, shrink=shrink), sol.grid.n1, sol.grid.n2)
    T1, T2 = target.mesh()

    chart = sol.source if isinstance(sol.source, Chart) else None
    evaluator = ChartEvaluator.for_chart(chart) if chart is not None else None
    if evaluator is not None:
        x1, x2, u, J = _through_evaluator(chart, evaluator, T1, T2)
        mode = "evaluator"
    else:
        pre = invert_sampled_map(sol.grid, g1, g2, T1, T2, label="gradient map")
        x1, x2 = pre.x1, pre.x2
        su = spline(sol.grid, sol.u)
        u = su.ev(x1, x2)
        J = su.ev(x1, x2, dx=2) * su.ev(x1, x2, dy=2) - su.ev(x1, x2, dx=1, dy=1) ** 2
        mode = "bicubic"

    logger.info(f"[inverse] Legendre transform of '{sol.name}' on {target.n1}x{target.n2} xi-grid ({mode})")
    return XGridSolution(
        grid=target,
        u=T1 * x1 + T2 * x2 - u,
        provenance=SolutionProvenance.LEGENDRE,
        xi1=x1,
        xi2=x2,
        J=1.0 / J,
        name=f"legendre({sol.name})",
    )
