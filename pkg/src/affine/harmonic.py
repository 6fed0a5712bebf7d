"""
Flat harmonic functions of (l1, l2) on a Grid2, stored as ScalarFields.

The grid's H axis plays l1 and its r axis plays l2, so a harmonic field can
be lifted to a seed on the same grid without resampling.
"""
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from loguru import logger

from src.core.config import settings
from src.core.errors import IncompatibleSeedError, NonHarmonicError
from src.seeds.fields import ClosedForm, Jet, JetSource, ScalarField
from src.seeds.grid import Grid2


def _form(value: Callable, d1: Callable, d2: Callable, d11: Callable, d12: Callable, d22: Callable) -> ClosedForm:
    def form(l1, l2):
        l1, l2 = np.broadcast_arrays(np.asarray(l1, dtype=float), np.asarray(l2, dtype=float))
        return (
            np.asarray(value(l1, l2), dtype=float) + 0.0 * l1,
            Jet(*(np.asarray(f(l1, l2), dtype=float) + 0.0 * l1 for f in (d1, d2, d11, d12, d22))),
        )
    return form


def _zero(l1, l2):
    return 0.0


HARMONICS: Dict[str, ClosedForm] = {
    "l1": _form(lambda a, b: a, lambda a, b: 1.0, _zero, _zero, _zero, _zero),
    "l2": _form(lambda a, b: b, _zero, lambda a, b: 1.0, _zero, _zero, _zero),
    "r": _form(lambda a, b: b, _zero, lambda a, b: 1.0, _zero, _zero, _zero),
    "const": _form(lambda a, b: 1.0, _zero, _zero, _zero, _zero, _zero),
    "l1*l2": _form(lambda a, b: a * b, lambda a, b: b, lambda a, b: a, _zero, lambda a, b: 1.0, _zero),
    "l1^2-l2^2": _form(lambda a, b: a * a - b * b, lambda a, b: 2.0 * a, lambda a, b: -2.0 * b,
                       lambda a, b: 2.0, _zero, lambda a, b: -2.0),
    # not harmonic: Laplacian 2
    "l1^2": _form(lambda a, b: a * a, lambda a, b: 2.0 * a, _zero, lambda a, b: 2.0, _zero, _zero),
}


def harmonic_field(name: str, grid: Grid2) -> ScalarField:
    form = HARMONICS.get(name.strip())
    if form is None:
        raise IncompatibleSeedError(f"Unknown harmonic function '{name}'; known: {', '.join(HARMONICS)}")
    return ScalarField.from_closed_form(grid, form, name.strip())


def laplacian(F: ScalarField) -> ScalarField:
    jet = F.require_jet()
    return ScalarField(grid=F.grid, values=jet.dHH + jet.drr, name=f"Laplacian[{F.name}]")


def harmonic_defect(F: ScalarField) -> float:
    """L-infinity of the flat Laplacian; analytic jets are checked on every node."""
    margin = 0 if F.jet_source == JetSource.ANALYTIC else 1
    return laplacian(F).interior_norms(margin=margin).linf


def require_harmonic(F: ScalarField, tol: Optional[float] = None) -> float:
    tol = settings().tol_harmonic if tol is None else tol
    defect = harmonic_defect(F)
    if defect > tol:
        lap = laplacian(F).values
        raise NonHarmonicError(
            f"'{F.name}' is not harmonic: Laplacian Linf {defect:.3e} > {tol:.1e}",
            nodes=[tuple(n) for n in np.argwhere(np.abs(lap) > tol)],
        )
    return defect


@dataclass(frozen=True)
class HarmonicTriple:
    F1: ScalarField
    F2: ScalarField
    F3: ScalarField
    defects: Tuple[float, float, float]

    @classmethod
    def build(cls, F1: ScalarField, F2: ScalarField, F3: ScalarField) -> "HarmonicTriple":
        if not (F1.grid == F2.grid == F3.grid):
            raise IncompatibleSeedError("Harmonic triple members live on different grids")
        return cls(F1, F2, F3, (harmonic_defect(F1), harmonic_defect(F2), harmonic_defect(F3)))

    @property
    def grid(self) -> Grid2:
        return self.F1.grid

    @property
    def members(self) -> Tuple[ScalarField, ScalarField, ScalarField]:
        return (self.F1, self.F2, self.F3)

    def require_harmonic(self, tol: Optional[float] = None) -> None:
        for F in self.members:
            require_harmonic(F, tol)
        logger.debug(f"[affine] Harmonic triple defects {['%.1e' % d for d in self.defects]}")

    def stacked(self) -> Tuple[np.ndarray, Jet]:
        """Values (..., 3) and the jet with (..., 3) components."""
        jets = [F.require_jet() for F in self.members]
        values = np.stack([F.values for F in self.members], axis=-1)
        jet = Jet(*(np.stack([getattr(j, k) for j in jets], axis=-1) for k in ("dH", "dr", "dHH", "dHr", "drr")))
        return values, jet

