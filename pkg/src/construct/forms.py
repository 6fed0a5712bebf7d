"""
The three 1-forms of the construction and their integration.

    eps1 = p (xi2_r dH - xi2_H dr)
    eps2 = p (-xi1_r dH + xi1_H dr)
    eps  = xi1 eps1 + xi2 eps2

d(eps1) = -p L[xi2] and d(eps2) = p L[xi1], where L is the linear operator
of the seeds module, so closedness is equivalent to the seeds solving it.
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from loguru import logger

from src.core import stencils
from src.core.errors import ClosednessError, GridMismatchError
from src.core.integrate import two_path_integral
from src.potential.models import JoyceData
from src.seeds.fields import Jet, JetSource, ScalarField
from src.seeds.grid import Grid2


@dataclass(frozen=True)
class FormJet:
    a_H: np.ndarray
    a_r: np.ndarray
    b_H: np.ndarray
    b_r: np.ndarray


@dataclass(frozen=True)
class OneForm:
    """a dH + b dr on a grid."""
    grid: Grid2
    a: np.ndarray
    b: np.ndarray
    jet: Optional[FormJet] = None
    name: str = ""

    def exterior_derivative(self) -> np.ndarray:
        """d_H b - d_r a per node."""
        if self.jet is not None:
            return self.jet.b_H - self.jet.a_r
        return stencils.d1(self.b, self.grid.hH, 0) - stencils.d1(self.a, self.grid.hr, 1)

    def scale(self) -> float:
        """Magnitude of the form per unit length of the domain."""
        side = min(self.grid.H_range[1] - self.grid.H_range[0], self.grid.r_range[1] - self.grid.r_range[0])
        return max(float(np.max(np.abs(self.a))), float(np.max(np.abs(self.b))), 1e-300) / side


@dataclass(frozen=True)
class ClosednessReport:
    name: str
    field: np.ndarray
    linf: float
    l2: float
    scale: float

    @property
    def relative(self) -> float:
        return self.linf / self.scale

    def worst_nodes(self, count: int = 20):
        flat = np.argsort(-np.abs(self.field), axis=None)[:count]
        return [tuple(int(v) for v in np.unravel_index(k, self.field.shape)) for k in flat]


@dataclass(frozen=True)
class Primitive:
    """Integrated potential with the two-path audit."""
    field: ScalarField
    discrepancy: float
    closedness: ClosednessReport


def build_forms(xi1: ScalarField, xi2: ScalarField, jd: JoyceData) -> Tuple[OneForm, OneForm, OneForm]:
    if xi1.grid != xi2.grid:
        raise GridMismatchError("Seeds must share a grid")
    grid = xi1.grid
    grid.check_inside(jd)
    _, RR = grid.mesh()
    p = np.asarray(jd.p(RR), dtype=float)
    p1 = np.asarray(jd.p1(RR), dtype=float)
    x1, x2 = xi1.values, xi2.values
    j1, j2 = xi1.require_jet(), xi2.require_jet()

    eps1 = OneForm(
        grid=grid,
        a=p * j2.dr,
        b=-p * j2.dH,
        jet=FormJet(
            a_H=p * j2.dHr,
            a_r=p1 * j2.dr + p * j2.drr,
            b_H=-p * j2.dHH,
            b_r=-p1 * j2.dH - p * j2.dHr,
        ),
        name="eps1",
    )
    eps2 = OneForm(
        grid=grid,
        a=-p * j1.dr,
        b=p * j1.dH,
        jet=FormJet(
            a_H=-p * j1.dHr,
            a_r=-p1 * j1.dr - p * j1.drr,
            b_H=p * j1.dHH,
            b_r=p1 * j1.dH + p * j1.dHr,
        ),
        name="eps2",
    )
    f1, f2 = eps1.jet, eps2.jet
    eps = OneForm(
        grid=grid,
        a=x1 * eps1.a + x2 * eps2.a,
        b=x1 * eps1.b + x2 * eps2.b,
        jet=FormJet(
            a_H=j1.dH * eps1.a + x1 * f1.a_H + j2.dH * eps2.a + x2 * f2.a_H,
            a_r=j1.dr * eps1.a + x1 * f1.a_r + j2.dr * eps2.a + x2 * f2.a_r,
            b_H=j1.dH * eps1.b + x1 * f1.b_H + j2.dH * eps2.b + x2 * f2.b_H,
            b_r=j1.dr * eps1.b + x1 * f1.b_r + j2.dr * eps2.b + x2 * f2.b_r,
        ),
        name="eps",
    )
    return eps1, eps2, eps


def closedness_residual(w: OneForm) -> ClosednessReport:
    """d_H b - d_r a with norms over the interior (the full grid for exact jets)."""
    field = w.exterior_derivative()
    margin = 0 if w.jet is not None else 1
    mask = stencils.margin_mask(w.grid.shape, margin)
    n = stencils.norms(field, w.grid.hH, w.grid.hr, mask)
    return ClosednessReport(name=w.name, field=field, linf=n.linf, l2=n.l2, scale=w.scale())


def integrate_potential(
    w: OneForm,
    base: Tuple[int, int],
    tol: float = 1e-6,
    name: Optional[str] = None,
    jet_source: JetSource = JetSource.ANALYTIC,
) -> Primitive:
    """
    phi with d(phi) = w and phi(base) = 0, refused when the relative
    closedness residual exceeds ``tol``.
    """
    report = closedness_residual(w)
    if report.relative > tol:
        logger.error(f"[construct] {w.name} is not closed: Linf={report.linf:.3e} (relative {report.relative:.3e} > {tol:.1e})")
        raise ClosednessError(
            f"{w.name} is not closed: d{w.name} Linf={report.linf:.3e}, L2={report.l2:.3e}, relative {report.relative:.3e} > {tol:.1e}",
            nodes=report.worst_nodes(),
        )
    i0, j0 = base
    if not (0 <= i0 < w.grid.nH and 0 <= j0 < w.grid.nr):
        raise GridMismatchError(f"Base node {base} is outside the {w.grid.nH}x{w.grid.nr} grid")

    jet = w.jet
    path = two_path_integral(
        w.a,
        w.b,
        w.grid.hH,
        w.grid.hr,
        base,
        a_d0=None if jet is None else jet.a_H,
        b_d1=None if jet is None else jet.b_r,
    )
    if jet is not None:
        field_jet = Jet(dH=w.a, dr=w.b, dHH=jet.a_H, dHr=0.5 * (jet.a_r + jet.b_H), drr=jet.b_r)
        field = ScalarField(grid=w.grid, values=path.values, jet=field_jet, jet_source=jet_source, name=name or w.name)
    else:
        field = ScalarField.from_values(w.grid, path.values, name=name or w.name)
    logger.debug(f"[construct] Integrated {w.name}: path discrepancy {path.discrepancy:.3e}")
    return Primitive(field=field, discrepancy=path.discrepancy, closedness=report)
