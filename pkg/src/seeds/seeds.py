"""
Seed specs, seed construction and the residual of the linear equation

    xi_HH + (1/p) (p xi_r)_r = 0.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Tuple

import numpy as np
from loguru import logger

from src.core.errors import IncompatibleSeedError
from src.potential.models import JoyceData
from src.seeds import closed_forms
from src.seeds.fields import Jet, JetSource, ScalarField
from src.seeds.grid import Grid2
from src.seeds.radial import solve_radial_mode


class SeedKind(Enum):
    COORDINATE_H = "coordinate-H"
    RADIAL = "radial"
    SEPARABLE_MODE = "separable-mode"
    POINT_SOURCE = "point-source"
    CUSTOM = "custom-closed-form"


@dataclass(frozen=True)
class SeedSpec:
    kind: SeedKind
    text: str
    name: str = ""                 # radial / custom closed-form name
    params: Tuple[float, ...] = field(default_factory=tuple)

    def __str__(self) -> str:
        return self.text


def parse_seed(text: str) -> SeedSpec:
    """
    Parse ``H``, ``logr``, ``radial``, ``pointsource:<Hc>``,
    ``mode:<k>:<phase>:<R0>:<R0'>`` or ``expr:<name>``.
    """
    text = text.strip()
    head, _, rest = text.partition(":")
    try:
        if text == "H":
            return SeedSpec(SeedKind.COORDINATE_H, text, name="H")
        if text in ("logr", "radial"):
            return SeedSpec(SeedKind.RADIAL, text, name=text)
        if head == "pointsource":
            return SeedSpec(SeedKind.POINT_SOURCE, text, params=(float(rest),))
        if head == "mode":
            params = tuple(float(v) for v in rest.split(":"))
            if len(params) != 4:
                raise ValueError("mode needs k:phase:R0:R0'")
            if params[0] == 0.0:
                raise IncompatibleSeedError("Separable modes need k != 0")
            return SeedSpec(SeedKind.SEPARABLE_MODE, text, params=params)
        if head == "expr":
            if rest not in closed_forms.NAMED_FORMS:
                raise IncompatibleSeedError(f"Unknown closed form '{rest}' (known: {', '.join(closed_forms.NAMED_FORMS)})")
            return SeedSpec(SeedKind.CUSTOM, text, name=rest)
    except ValueError as e:
        if isinstance(e, IncompatibleSeedError):
            raise
        raise IncompatibleSeedError(f"Invalid seed spec '{text}': {e}") from e
    raise IncompatibleSeedError(f"Unknown seed spec '{text}' (use H, logr, radial, pointsource:<Hc>, mode:..., expr:<name>)")


def _separable_mode(spec: SeedSpec, jd: JoyceData, grid: Grid2) -> ScalarField:
    k, phase, R0, dR0 = spec.params
    profile = solve_radial_mode(k, jd, grid.r_range, (R0, dR0), grid.nr)
    HH, _ = grid.mesh()
    c = np.cos(k * HH + phase)
    s = np.sin(k * HH + phase)
    R, dR, d2R = profile.R[None, :], profile.dR[None, :], profile.d2R[None, :]
    jet = Jet(
        dH=-k * s * R,
        dr=c * dR,
        dHH=-(k**2) * c * R,
        dHr=-k * s * dR,
        drr=c * d2R,
    )
    return ScalarField(grid=grid, values=c * R, jet=jet, jet_source=JetSource.ODE, name=spec.text)


def make_seed(spec: SeedSpec, jd: JoyceData, grid: Grid2) -> ScalarField:
    """A solution (or control field) of the linear equation on ``grid``."""
    grid.check_inside(jd)
    if spec.kind == SeedKind.SEPARABLE_MODE:
        seed = _separable_mode(spec, jd, grid)
    else:
        if spec.kind == SeedKind.POINT_SOURCE:
            closed_forms.require_weight(jd, "linear", spec.text)
            form = closed_forms.point_source(spec.params[0])
        else:
            form = closed_forms.named_form(spec.name, jd)
        seed = ScalarField.from_closed_form(grid, form, spec.text)
    logger.debug(f"[seeds] Built seed '{spec.text}' on {grid.nH}x{grid.nr} ({seed.jet_source.value} jet)")
    return seed


def linear_residual(xi: ScalarField, jd: JoyceData) -> ScalarField:
    """xi_HH + xi_rr + (p'/p) xi_r per node, from the field's jet."""
    xi.grid.check_inside(jd)
    jet = xi.require_jet()
    _, RR = xi.grid.mesh()
    ratio = np.asarray(jd.p1(RR), dtype=float) / np.asarray(jd.p(RR), dtype=float)
    residual = jet.dHH + jet.drr + ratio * jet.dr
    out = ScalarField(grid=xi.grid, values=residual, name=f"L[{xi.name}]")
    n = out.interior_norms()
    logger.debug(f"[seeds] Linear residual of '{xi.name}': Linf={n.linf:.3e}, L2={n.l2:.3e}")
    return out
