"""
Resampling a chart onto a rectangular (x1, x2) grid.

Each target node is pulled back to (H, r) by Newton iteration seeded from
the nearest chart node. With closed-form seeds the chart evaluator gives
exact x(H, r) and A; otherwise x1, x2, u, xi are bicubic splines over the
chart grid and the Jacobian is the spline derivative.
"""
from typing import Callable, Optional, Tuple

import numpy as np
from loguru import logger
from scipy.interpolate import RectBivariateSpline
from scipy.spatial import cKDTree
from skimage.measure import points_in_poly

from src.construct.chart import Chart
from src.construct.evaluator import ChartEvaluator
from src.core.config import settings
from src.core.errors import NewtonError, OutsideImageError
from src.verify.models import SolutionProvenance, XGrid, XGridSolution

Box = Tuple[float, float, float, float]


def boundary_polygon(c0: np.ndarray, c1: np.ndarray) -> np.ndarray:
    """Image of the grid boundary as a closed vertex list (m, 2)."""
    ring0 = np.concatenate([c0[:, 0], c0[-1, 1:], c0[-2::-1, -1], c0[0, -2:0:-1]])
    ring1 = np.concatenate([c1[:, 0], c1[-1, 1:], c1[-2::-1, -1], c1[0, -2:0:-1]])
    return np.column_stack([ring0, ring1])


def inscribed_box(
    c0: np.ndarray,
    c1: np.ndarray,
    center: Optional[Tuple[float, float]] = None,
    shrink: float = 0.9,
    samples: int = 64,
) -> Box:
    """
    Axis-aligned box inside the image of a grid map, centred on the image of
    the central node, with half-widths proportional to the bounding box.
    """
    verts = boundary_polygon(c0, c1)
    if center is None:
        center = (float(c0[c0.shape[0] // 2, c0.shape[1] // 2]), float(c1[c1.shape[0] // 2, c1.shape[1] // 2]))
    w0 = 0.5 * float(np.ptp(verts[:, 0]))
    w1 = 0.5 * float(np.ptp(verts[:, 1]))
    s = np.linspace(-1.0, 1.0, samples)
    ones = np.ones_like(s)
    unit = np.concatenate([
        np.column_stack([s, -ones]), np.column_stack([ones, s]),
        np.column_stack([-s, ones]), np.column_stack([-ones, -s]),
    ])

    def fits(t: float) -> bool:
        pts = np.column_stack([center[0] + t * w0 * unit[:, 0], center[1] + t * w1 * unit[:, 1]])
        return bool(np.all(points_in_poly(pts, verts)))

    lo, hi = 0.0, 1.0
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if fits(mid):
            lo = mid
        else:
            hi = mid
    t = shrink * lo
    if t <= 0.0:
        raise OutsideImageError("Could not fit a box inside the image of the chart")
    return (center[0] - t * w0, center[0] + t * w0, center[1] - t * w1, center[1] + t * w1)


def chart_box(chart: Chart, shrink: float = 0.9) -> Box:
    return inscribed_box(chart.x1.values, chart.x2.values, shrink=shrink)


def _outside_nodes(mask: np.ndarray, shape: Tuple[int, int]):
    return [tuple(int(v) for v in np.unravel_index(k, shape)) for k in np.flatnonzero(mask)]


def resample_to_xgrid(
    chart: Chart,
    target: XGrid,
    tol: Optional[float] = None,
    maxiter: Optional[int] = None,
    evaluator: Optional[ChartEvaluator] = None,
) -> XGridSolution:
    tol = settings().tol_newton if tol is None else tol
    maxiter = settings().newton_maxiter if maxiter is None else maxiter
    evaluator = evaluator or ChartEvaluator.for_chart(chart)
    grid = chart.grid

    X1, X2 = target.mesh()
    targets = np.column_stack([X1.ravel(), X2.ravel()])
    inside = points_in_poly(targets, boundary_polygon(chart.x1.values, chart.x2.values))
    if not np.all(inside):
        raise OutsideImageError(
            f"{int((~inside).sum())} target nodes lie outside the chart image",
            nodes=_outside_nodes(~inside, target.shape),
        )

    HH, RR = grid.mesh()
    tree = cKDTree(np.column_stack([chart.x1.values.ravel(), chart.x2.values.ravel()]))
    _, idx = tree.query(targets)
    H = HH.ravel()[idx].copy()
    r = RR.ravel()[idx].copy()

    if evaluator is None:
        s1 = RectBivariateSpline(grid.H, grid.r, chart.x1.values, kx=3, ky=3, s=0)
        s2 = RectBivariateSpline(grid.H, grid.r, chart.x2.values, kx=3, ky=3, s=0)

        def map_and_jacobian(H, r):
            x = np.column_stack([s1.ev(H, r), s2.ev(H, r)])
            A = np.empty((H.size, 2, 2))
            A[:, 0, 0], A[:, 0, 1] = s1.ev(H, r, dx=1), s1.ev(H, r, dy=1)
            A[:, 1, 0], A[:, 1, 1] = s2.ev(H, r, dx=1), s2.ev(H, r, dy=1)
            return x, A
    else:
        def map_and_jacobian(H, r):
            pot, forms = evaluator.evaluate(H, r)
            return pot[:, :2], forms.A

    lo, hi = chart.jd.interval
    pad = 0.5 * (grid.r_range[1] - grid.r_range[0])
    r_lo = max(grid.r_range[0] - pad, lo + 1e-12 * max(1.0, abs(lo)) if np.isfinite(lo) else -np.inf)
    r_hi = min(grid.r_range[1] + pad, hi - 1e-12 * max(1.0, abs(hi)) if np.isfinite(hi) else np.inf)

    converged = False
    for it in range(maxiter):
        x, A = map_and_jacobian(H, r)
        step = np.linalg.solve(A, (x - targets)[..., None])[..., 0]
        H = H - step[:, 0]
        r = np.clip(r - step[:, 1], r_lo, r_hi)
        size = np.abs(step) / (1.0 + np.abs(np.column_stack([H, r])))
        if np.all(size <= tol):
            converged = True
            logger.debug(f"[verify] Resampling Newton converged in {it + 1} iterations")
            break
    if not converged:
        bad = np.any(size > tol, axis=1)
        raise NewtonError(
            f"Resampling Newton did not converge at {int(bad.sum())} nodes within {maxiter} iterations",
            nodes=_outside_nodes(bad, target.shape),
        )

    eps_H = 1e-9 * (grid.H_range[1] - grid.H_range[0])
    eps_r = 1e-9 * (grid.r_range[1] - grid.r_range[0])
    off = (H < grid.H_range[0] - eps_H) | (H > grid.H_range[1] + eps_H) | (r < grid.r_range[0] - eps_r) | (r > grid.r_range[1] + eps_r)
    if np.any(off):
        raise OutsideImageError(
            f"{int(off.sum())} target nodes pull back outside the chart rectangle",
            nodes=_outside_nodes(off, target.shape),
        )

    if evaluator is not None:
        pot, forms = evaluator.evaluate(H, r)
        u, xi1, xi2 = pot[:, 2], forms.xi1, forms.xi2
    else:
        u, xi1, xi2 = chart.u.evaluate(H, r), chart.xi1.evaluate(H, r), chart.xi2.evaluate(H, r)
    J = chart.jd.J(r)

    shape = target.shape
    mode = "evaluator" if evaluator is not None else "bicubic"
    logger.info(f"[verify] Resampled chart onto {shape[0]}x{shape[1]} x-grid ({mode})")
    return XGridSolution(
        grid=target,
        u=u.reshape(shape),
        provenance=SolutionProvenance.RESAMPLED,
        xi1=np.asarray(xi1).reshape(shape),
        xi2=np.asarray(xi2).reshape(shape),
        J=np.asarray(J).reshape(shape),
        H=H.reshape(shape),
        r=r.reshape(shape),
        name=f"resampled({chart.xi1.name}, {chart.xi2.name})",
        source=chart,
    )


def closed_form_solution(
    target: XGrid,
    u_fn: Callable[[np.ndarray, np.ndarray], np.ndarray],
    grad_fn: Optional[Callable[[np.ndarray, np.ndarray], Tuple[np.ndarray, np.ndarray]]] = None,
    name: str = "",
) -> XGridSolution:
    X1, X2 = target.mesh()
    xi1 = xi2 = None
    if grad_fn is not None:
        xi1, xi2 = (np.asarray(g, dtype=float) for g in grad_fn(X1, X2))
    return XGridSolution(
        grid=target,
        u=np.asarray(u_fn(X1, X2), dtype=float),
        provenance=SolutionProvenance.CLOSED_FORM,
        xi1=xi1,
        xi2=xi2,
        name=name,
    )
