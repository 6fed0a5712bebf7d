"""
Grid functions of (H, r) with an optional 2-jet.
"""
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.interpolate import RectBivariateSpline

from src.core import stencils
from src.core.errors import GridMismatchError
from src.seeds.grid import Grid2


class JetSource(Enum):
    ANALYTIC = "analytic"
    FINITE_DIFFERENCE = "finite-difference"
    ODE = "ode"  # analytic in H, radial derivatives from the ODE state


@dataclass(frozen=True)
class Jet:
    """First and second partial derivatives (H, r, HH, Hr, rr)."""
    dH: np.ndarray
    dr: np.ndarray
    dHH: np.ndarray
    dHr: np.ndarray
    drr: np.ndarray

    def combine(self, a: float, other: "Jet", b: float) -> "Jet":
        return Jet(
            dH=a * self.dH + b * other.dH,
            dr=a * self.dr + b * other.dr,
            dHH=a * self.dHH + b * other.dHH,
            dHr=a * self.dHr + b * other.dHr,
            drr=a * self.drr + b * other.drr,
        )

    def sliced(self, key) -> "Jet":
        return Jet(self.dH[key], self.dr[key], self.dHH[key], self.dHr[key], self.drr[key])

    @classmethod
    def constant(cls, shape) -> "Jet":
        z = np.zeros(shape)
        return cls(z, z, z, z, z)


# (H, r) -> (value, jet), evaluable at arbitrary points
ClosedForm = Callable[[np.ndarray, np.ndarray], Tuple[np.ndarray, Jet]]


def fd_jet(values: np.ndarray, grid: Grid2) -> Jet:
    """The canonical stencil applied to grid values."""
    hH, hr = grid.hH, grid.hr
    dHH, dHr, drr = stencils.hessian(values, hH, hr)
    return Jet(
        dH=stencils.d1(values, hH, 0),
        dr=stencils.d1(values, hr, 1),
        dHH=dHH,
        dHr=dHr,
        drr=drr,
    )


def _weaker(a: JetSource, b: JetSource) -> JetSource:
    if a == b:
        return a
    if JetSource.FINITE_DIFFERENCE in (a, b):
        return JetSource.FINITE_DIFFERENCE
    return JetSource.ODE


@dataclass(frozen=True)
class ScalarField:
    grid: Grid2
    values: np.ndarray
    jet: Optional[Jet] = None
    jet_source: JetSource = JetSource.FINITE_DIFFERENCE
    name: str = ""
    closed_form: Optional[ClosedForm] = field(default=None, repr=False, compare=False)

    @classmethod
    def from_closed_form(cls, grid: Grid2, form: ClosedForm, name: str) -> "ScalarField":
        HH, RR = grid.mesh()
        values, jet = form(HH, RR)
        return cls(grid=grid, values=values, jet=jet, jet_source=JetSource.ANALYTIC, name=name, closed_form=form)

    @classmethod
    def from_values(cls, grid: Grid2, values: np.ndarray, name: str = "") -> "ScalarField":
        values = np.asarray(values, dtype=float)
        if values.shape != grid.shape:
            raise GridMismatchError(f"Values of shape {values.shape} do not match grid {grid.shape}")
        return cls(grid=grid, values=values, jet=fd_jet(values, grid), jet_source=JetSource.FINITE_DIFFERENCE, name=name)

    def with_fd_jet(self) -> "ScalarField":
        return ScalarField(
            grid=self.grid,
            values=self.values,
            jet=fd_jet(self.values, self.grid),
            jet_source=JetSource.FINITE_DIFFERENCE,
            name=self.name,
            closed_form=self.closed_form,
        )

    def require_jet(self) -> Jet:
        return self.jet if self.jet is not None else fd_jet(self.values, self.grid)

    # -------------------------------------------------------------------------
    # Off-grid evaluation
    # -------------------------------------------------------------------------

    @cached_property
    def _spline(self) -> RectBivariateSpline:
        return RectBivariateSpline(self.grid.H, self.grid.r, self.values, kx=3, ky=3, s=0)

    def evaluate(self, H, r) -> np.ndarray:
        """Values at arbitrary points: exact for closed forms, bicubic otherwise."""
        H, r = np.broadcast_arrays(np.asarray(H, dtype=float), np.asarray(r, dtype=float))
        if self.closed_form is not None:
            return np.asarray(self.closed_form(H, r)[0], dtype=float)
        return self._spline.ev(H, r)

    def evaluate_jet(self, H, r) -> Tuple[np.ndarray, Jet]:
        H, r = np.broadcast_arrays(np.asarray(H, dtype=float), np.asarray(r, dtype=float))
        if self.closed_form is not None:
            return self.closed_form(H, r)
        s = self._spline
        return s.ev(H, r), Jet(
            dH=s.ev(H, r, dx=1),
            dr=s.ev(H, r, dy=1),
            dHH=s.ev(H, r, dx=2),
            dHr=s.ev(H, r, dx=1, dy=1),
            drr=s.ev(H, r, dy=2),
        )

    # -------------------------------------------------------------------------
    # Algebra
    # -------------------------------------------------------------------------

    def linear_combination(self, a: float, other: "ScalarField", b: float, name: Optional[str] = None) -> "ScalarField":
        if other.grid != self.grid:
            raise GridMismatchError("Cannot combine fields on different grids")
        form = None
        if self.closed_form is not None and other.closed_form is not None:
            f, g = self.closed_form, other.closed_form

            def form(H, r):
                fv, fj = f(H, r)
                gv, gj = g(H, r)
                return a * fv + b * gv, fj.combine(a, gj, b)

        return ScalarField(
            grid=self.grid,
            values=a * self.values + b * other.values,
            jet=self.require_jet().combine(a, other.require_jet(), b),
            jet_source=_weaker(self.jet_source, other.jet_source) if self.jet is not None and other.jet is not None
            else JetSource.FINITE_DIFFERENCE,
            name=name or f"{a:g}*{self.name}+{b:g}*{other.name}",
            closed_form=form,
        )

    def __add__(self, other: "ScalarField") -> "ScalarField":
        return self.linear_combination(1.0, other, 1.0, name=f"{self.name}+{other.name}")

    def __sub__(self, other: "ScalarField") -> "ScalarField":
        return self.linear_combination(1.0, other, -1.0, name=f"{self.name}-{other.name}")

    def __mul__(self, c: float) -> "ScalarField":
        return self.linear_combination(float(c), self, 0.0, name=f"{c:g}*{self.name}")

    __rmul__ = __mul__

    def __neg__(self) -> "ScalarField":
        return self * -1.0

    def shifted(self, c: float) -> "ScalarField":
        """Add a constant (jets unchanged)."""
        form = None
        if self.closed_form is not None:
            f = self.closed_form

            def form(H, r):
                v, j = f(H, r)
                return v + c, j

        return ScalarField(self.grid, self.values + c, self.jet, self.jet_source, self.name, form)

    def restrict(self, i0: int, i1: int, j0: int, j1: int) -> "ScalarField":
        """Restriction to the inclusive index rectangle [i0, i1] x [j0, j1]."""
        key = (slice(i0, i1 + 1), slice(j0, j1 + 1))
        sub = self.grid.sub(i0, i1, j0, j1)
        if self.closed_form is not None:
            return ScalarField.from_closed_form(sub, self.closed_form, self.name)
        return ScalarField(
            grid=sub,
            values=self.values[key],
            jet=None if self.jet is None else self.jet.sliced(key),
            jet_source=self.jet_source,
            name=self.name,
        )

    def interior_norms(self, margin: int = 1) -> stencils.Norms:
        mask = stencils.margin_mask(self.grid.shape, margin)
        return stencils.norms(self.values, self.grid.hH, self.grid.hr, mask)
