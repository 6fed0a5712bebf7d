"""
Equivalence of the two routes to an affine maximal surface:

    A: Chern-Terng integration of the triple (F1, F2, r)
    B: lift F1, F2 to seeds for p(r) = r^2, then the seed-pair surface.
"""
from typing import Optional, Tuple

from loguru import logger
from pydantic import BaseModel

from src.affine.chern_terng import chern_terng_integrate
from src.affine.donaldson import donaldson_surface
from src.affine.harmonic import HARMONICS, HarmonicTriple
from src.affine.lift import lift_harmonic_to_seed
from src.affine.surface import Surface
from src.core.config import settings
from src.core.errors import GridMismatchError, RouteInconsistencyError
from src.potential.builtins import affine
from src.potential.joyce import derive_joyce_data
from src.seeds.fields import ScalarField


class EquivalenceReport(BaseModel):
    grid: Tuple[int, int]
    offset: Tuple[float, float, float]
    linf: float
    discrepancy_a: float
    discrepancy_b: float
    tolerance: float
    passed: bool


def equivalence_check(
    F1: ScalarField,
    F2: ScalarField,
    base: Optional[Tuple[int, int]] = None,
    tol: Optional[float] = None,
    harmonic_tol: Optional[float] = None,
    strict: bool = False,
) -> Tuple[EquivalenceReport, Surface, Surface]:
    """
    Returns the report and both surfaces. With ``strict`` a mismatch beyond
    ``tol`` raises RouteInconsistencyError.
    """
    tol = settings().tol_residual if tol is None else tol
    if F1.grid != F2.grid:
        raise GridMismatchError("F1 and F2 live on different grids")
    grid = F1.grid
    F3 = ScalarField.from_closed_form(grid, HARMONICS["r"], "r")
    route_a = chern_terng_integrate(HarmonicTriple.build(F1, F2, F3), base, harmonic_tol)

    jd = derive_joyce_data(affine())
    xi1 = lift_harmonic_to_seed(F1, jd, base, harmonic_tol)
    xi2 = lift_harmonic_to_seed(F2, jd, base, harmonic_tol)
    route_b = donaldson_surface(xi1, xi2, jd, base)

    offset, linf = route_a.aligned_difference(route_b.Z)
    report = EquivalenceReport(
        grid=grid.shape,
        offset=tuple(float(v) for v in offset),
        linf=linf,
        discrepancy_a=route_a.discrepancy,
        discrepancy_b=route_b.discrepancy,
        tolerance=tol,
        passed=linf <= tol,
    )
    logger.info(f"[affine] Route equivalence for ({F1.name}, {F2.name}): aligned Linf {linf:.3e} -> {'PASS' if report.passed else 'FAIL'}")
    if strict and not report.passed:
        raise RouteInconsistencyError(f"Routes disagree: aligned Linf {linf:.3e} > {tol:.1e}")
    return report, route_a, route_b
