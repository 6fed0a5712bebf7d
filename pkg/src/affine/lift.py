"""
Lifting a harmonic F to a seed for the weight p(r) = r^2:
    p xi_H = r F_H,   p xi_r = r F_r - F.
The system is consistent for every smooth F; the lifted seed solves the
linear equation exactly when F is harmonic, with residual Laplacian(F) / r.
"""
from typing import Optional, Tuple

import numpy as np
from loguru import logger

from src.affine.harmonic import require_harmonic
from src.core.errors import DomainError, IncompatibleSeedError
from src.core.integrate import two_path_integral
from src.potential.models import JoyceData
from src.seeds.fields import ClosedForm, Jet, ScalarField


def _lift_jet(F, jet: Jet, r) -> Jet:
    return Jet(
        dH=jet.dH / r,
        dr=jet.dr / r - F / r**2,
        dHH=jet.dHH / r,
        dHr=jet.dHr / r - jet.dH / r**2,
        drr=jet.drr / r - 2.0 * jet.dr / r**2 + 2.0 * F / r**3,
    )


def lifted_form(form: ClosedForm) -> ClosedForm:
    """F / r as a closed form."""
    def lifted(H, r):
        H, r = np.broadcast_arrays(np.asarray(H, dtype=float), np.asarray(r, dtype=float))
        F, jet = form(H, r)
        return F / r, _lift_jet(F, jet, r)
    return lifted


def lift_harmonic_to_seed(
    F: ScalarField,
    jd: JoyceData,
    base: Optional[Tuple[int, int]] = None,
    tol: Optional[float] = None,
    strict: bool = True,
) -> ScalarField:
    """
    Integrates the lift with xi(base) = F(base) / r(base), which makes
    xi = F / r up to quadrature error.
    """
    if not jd.is_square:
        raise IncompatibleSeedError(f"The harmonic lift needs p(r) = r^2, got {jd.name}")
    grid = F.grid
    if grid.r_range[0] <= 0.0:
        raise DomainError(f"The harmonic lift needs r > 0, grid has r in {grid.r_range}")
    if strict:
        require_harmonic(F, tol)
    base = base or (0, 0)

    _, RR = grid.mesh()
    jet = _lift_jet(F.values, F.require_jet(), RR)
    path = two_path_integral(jet.dH, jet.dr, grid.hH, grid.hr, base, jet.dHH, jet.drr)
    values = path.values + F.values[base] / RR[base]

    closed_form = lifted_form(F.closed_form) if F.closed_form is not None else None
    logger.debug(f"[affine] Lifted '{F.name}': path discrepancy {path.discrepancy:.3e}")
    return ScalarField(
        grid=grid,
        values=values,
        jet=jet,
        jet_source=F.jet_source,
        name=f"lift[{F.name}]",
        closed_form=closed_form,
    )
