"""
Recovering the seed pair from a solution u on an x-grid.

r = f(J), H is the conjugate Hamiltonian of the flux v and the seeds are
the gradient of u. The scattered (H, r) samples are pulled back onto a
rectangular (H, r) grid; the seeds are determined up to a translation in H
and additive constants, which are fitted when reference seeds are given.
"""
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from loguru import logger
from scipy.optimize import least_squares

from src.core import stencils
from src.core.errors import FoldOverError, NoOrdinaryPointsError
from src.inverse.conjugate import conjugate_H
from src.inverse.inversion import invert_sampled_map, spline
from src.inverse.ordinary import ordinary_point_mask, solution_J
from src.potential.joyce import f_of_J
from src.potential.models import JoyceData
from src.seeds.fields import ScalarField
from src.seeds.grid import Grid2
from src.seeds.seeds import linear_residual
from src.verify.flux import compute_v_field
from src.verify.models import XGrid, XGridSolution
from src.verify.resample import inscribed_box


@dataclass(frozen=True)
class GaugeFit:
    H_shift: float
    c1: float
    c2: float
    linf1: float
    linf2: float

    @property
    def linf(self) -> float:
        return max(self.linf1, self.linf2)

    def as_dict(self) -> Dict[str, float]:
        return {"H_shift": self.H_shift, "c1": self.c1, "c2": self.c2, "linf1": self.linf1, "linf2": self.linf2}


@dataclass(frozen=True)
class RecoveredSeeds:
    xgrid: XGrid
    H: np.ndarray           # per x-node
    r: np.ndarray
    xi1: ScalarField        # on the rectangular (H, r) grid
    xi2: ScalarField
    residual1: float        # L-infinity of the linear residual
    residual2: float
    conjugate_discrepancy: float
    gauge: Optional[GaugeFit] = None

    @property
    def grid(self) -> Grid2:
        return self.xi1.grid


def _restrict(sol: XGridSolution, rect) -> XGridSolution:
    i0, i1, j0, j1 = rect
    g = sol.grid
    if (i0, i1, j0, j1) == (0, g.n1 - 1, 0, g.n2 - 1):
        return sol
    key = (slice(i0, i1 + 1), slice(j0, j1 + 1))
    sub = XGrid((float(g.x1[i0]), float(g.x1[i1])), (float(g.x2[j0]), float(g.x2[j1])), i1 - i0 + 1, j1 - j0 + 1)

    def cut(a):
        return None if a is None else a[key]

    logger.info(f"[inverse] Restricting to the ordinary-point rectangle {rect}")
    return XGridSolution(
        grid=sub, u=sol.u[key], provenance=sol.provenance, xi1=cut(sol.xi1), xi2=cut(sol.xi2),
        J=cut(sol.J), H=cut(sol.H), r=cut(sol.r), name=sol.name, source=sol.source,
    )


def _check_fold_over(H: np.ndarray, r: np.ndarray, grid: XGrid) -> None:
    """The map x -> (H, r) must keep one orientation on the interior."""
    H1, H2 = stencils.gradient(H, grid.h1, grid.h2)
    r1, r2 = stencils.gradient(r, grid.h1, grid.h2)
    det = H1 * r2 - H2 * r1
    interior = stencils.margin_mask(grid.shape, 1)
    pos = interior & (det > 0.0)
    neg = interior & (det <= 0.0)
    if np.any(pos) and np.any(neg):
        minority = neg if neg.sum() <= pos.sum() else pos
        raise FoldOverError(
            f"The map x -> (H, r) folds over at {int(minority.sum())} nodes",
            nodes=[tuple(n) for n in np.argwhere(minority)],
        )


def fit_gauge(xi1: ScalarField, xi2: ScalarField, reference: Tuple[ScalarField, ScalarField]) -> GaugeFit:
    """Least-squares H-shift and constants with xi_i(H, r) = ref_i(H + dH, r) + c_i."""
    HH, RR = xi1.grid.mesh()
    interior = stencils.margin_mask(xi1.grid.shape, 1)
    H, r = HH[interior], RR[interior]
    v1, v2 = xi1.values[interior], xi2.values[interior]
    ref1, ref2 = reference

    def residual(params):
        dH, c1, c2 = params
        return np.concatenate([v1 - ref1.evaluate(H + dH, r) - c1, v2 - ref2.evaluate(H + dH, r) - c2])

    x0 = np.array([0.0, float(np.mean(v1 - ref1.evaluate(H, r))), float(np.mean(v2 - ref2.evaluate(H, r)))])
    fit = least_squares(residual, x0, method="lm", xtol=1e-15, ftol=1e-15)
    dH, c1, c2 = (float(v) for v in fit.x)
    res = residual(fit.x)
    gauge = GaugeFit(
        H_shift=dH, c1=c1, c2=c2,
        linf1=float(np.max(np.abs(res[: v1.size]))),
        linf2=float(np.max(np.abs(res[v1.size:]))),
    )
    logger.info(f"[inverse] Gauge fit: dH={dH:.6g}, c=({c1:.6g}, {c2:.6g}), aligned Linf={gauge.linf:.3e}")
    return gauge


def recover_seeds(
    sol: XGridSolution,
    jd: JoyceData,
    base: Optional[Tuple[int, int]] = None,
    shape: Optional[Tuple[int, int]] = None,
    reference: Optional[Tuple[ScalarField, ScalarField]] = None,
    delta: Optional[float] = None,
    divergence_tol: Optional[float] = None,
) -> RecoveredSeeds:
    mask = ordinary_point_mask(sol, jd, delta=delta, anchor=base)
    if mask.empty:
        where = "" if base is None else f" around node {base}"
        raise NoOrdinaryPointsError(
            f"No ordinary points in '{sol.name}'{where}: grad J vanishes (threshold {mask.threshold:.3e})"
        )
    sol = _restrict(sol, mask.rect)
    g = sol.grid
    # base indexes the input grid
    local = None if base is None else (base[0] - mask.rect[0], base[1] - mask.rect[2])

    r = f_of_J(jd, solution_J(sol))
    H = conjugate_H(compute_v_field(sol, jd), base=local, tol=divergence_tol)
    _check_fold_over(H.values, r, g)
    xi1, xi2 = stencils.gradient(sol.u, g.h1, g.h2)

    lo_H, hi_H, lo_r, hi_r = inscribed_box(H.values, r)
    nH, nr = shape or g.shape
    grid = Grid2((lo_H, hi_H), (lo_r, hi_r), nH, nr)
    grid.check_inside(jd)

    HH, RR = grid.mesh()
    pre = invert_sampled_map(g, H.values, r, HH, RR, label="map x -> (H, r)")
    s1, s2 = spline(g, xi1), spline(g, xi2)
    f1 = ScalarField.from_values(grid, s1.ev(pre.x1, pre.x2), name="xi1")
    f2 = ScalarField.from_values(grid, s2.ev(pre.x1, pre.x2), name="xi2")

    res1 = linear_residual(f1, jd).interior_norms().linf
    res2 = linear_residual(f2, jd).interior_norms().linf
    gauge = fit_gauge(f1, f2, reference) if reference is not None else None
    logger.info(
        f"[inverse] Recovered seeds on {nH}x{nr} (H, r) grid "
        f"H in [{lo_H:.4g}, {hi_H:.4g}], r in [{lo_r:.4g}, {hi_r:.4g}]; linear residuals {res1:.3e}, {res2:.3e}"
    )
    return RecoveredSeeds(
        xgrid=g, H=H.values, r=r, xi1=f1, xi2=f2,
        residual1=res1, residual2=res2, conjugate_discrepancy=H.discrepancy, gauge=gauge,
    )
