"""
Surfaces from a seed pair: with Xi = (xi1, xi2, 1),
    dZ/dH = p Xi x dXi/dr,   dZ/dr = -p Xi x dXi/dH.
Componentwise this is the forward chart system with Z = (-x1, -x2, u).
"""
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel

from src.affine.surface import Surface, integrate_surface
from src.construct.chart import Chart
from src.core.config import settings
from src.core.errors import GridMismatchError, ResidualToleranceError
from src.potential.models import JoyceData
from src.seeds.fields import JetSource, ScalarField
from src.seeds.seeds import linear_residual

# Euclidean motion taking the surface to (x1, x2, u)
CHART_ROTATION = np.diag([-1.0, -1.0, 1.0])


def _lifted(xi1: ScalarField, xi2: ScalarField):
    j1, j2 = xi1.require_jet(), xi2.require_jet()
    zero = np.zeros_like(xi1.values)

    def vec(f1, f2, third):
        return np.stack([f1, f2, third], axis=-1)

    Xi = vec(xi1.values, xi2.values, np.ones_like(zero))
    return Xi, vec(j1.dH, j2.dH, zero), vec(j1.dr, j2.dr, zero), \
        vec(j1.dHH, j2.dHH, zero), vec(j1.dHr, j2.dHr, zero), vec(j1.drr, j2.drr, zero)


def donaldson_surface(
    xi1: ScalarField,
    xi2: ScalarField,
    jd: JoyceData,
    base: Optional[Tuple[int, int]] = None,
    tol: Optional[float] = None,
) -> Surface:
    tol = settings().tol_residual if tol is None else tol
    if xi1.grid != xi2.grid:
        raise GridMismatchError("Seeds live on different grids")
    for xi in (xi1, xi2):
        margin = 0 if xi.jet_source == JetSource.ANALYTIC else 1
        defect = linear_residual(xi, jd).interior_norms(margin=margin).linf
        if defect > tol:
            raise ResidualToleranceError(f"Seed '{xi.name}' does not solve the linear equation: residual {defect:.3e} > {tol:.1e}")

    grid = xi1.grid
    _, RR = grid.mesh()
    p = np.asarray(jd.p(RR), dtype=float)[..., None]
    p1 = np.asarray(jd.p1(RR), dtype=float)[..., None]
    Xi, dH, dr, dHH, dHr, drr = _lifted(xi1, xi2)

    a = p * np.cross(Xi, dr)
    b = -p * np.cross(Xi, dH)
    a_d0 = p * (np.cross(dH, dr) + np.cross(Xi, dHr))
    b_d1 = -p1 * np.cross(Xi, dH) - p * (np.cross(dr, dH) + np.cross(Xi, dHr))
    consistency = np.cross(Xi, p * (dHH + drr) + p1 * dr)
    return integrate_surface(grid, a, b, a_d0, b_d1, consistency, base, f"donaldson({xi1.name}, {xi2.name})")


class SurfaceChartAlignment(BaseModel):
    offset: Tuple[float, float, float]
    linf: Tuple[float, float, float]
    tolerance: float
    passed: bool


def align_with_chart(surface: Surface, chart: Chart, tol: float = 1e-8) -> SurfaceChartAlignment:
    """Rotate Z by diag(-1, -1, 1) and fit the constant offset to (x1, x2, u)."""
    if surface.grid != chart.grid:
        raise GridMismatchError("Surface and chart live on different grids")
    rotated = surface.Z @ CHART_ROTATION
    target = np.stack([chart.x1.values, chart.x2.values, chart.u.values], axis=-1)
    diff = rotated - target
    offset = diff.reshape(-1, 3).mean(axis=0)
    linf = np.max(np.abs(diff - offset).reshape(-1, 3), axis=0)
    return SurfaceChartAlignment(
        offset=tuple(float(v) for v in offset),
        linf=tuple(float(v) for v in linf),
        tolerance=tol,
        passed=bool(np.max(linf) <= tol),
    )
