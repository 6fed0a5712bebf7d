"""
The conjugate Hamiltonian: dH = v2 dx1 - v1 dx2, closed exactly when the
flux v is divergence free.
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from loguru import logger

from src.core import stencils
from src.core.config import settings
from src.core.errors import DivergenceError
from src.core.integrate import two_path_integral
from src.verify.flux import FLUX_MARGIN, VField, divergence, flux_scale
from src.verify.models import XGrid


@dataclass(frozen=True)
class HarmonicConjugate:
    grid: XGrid
    values: np.ndarray
    discrepancy: float
    divergence: float   # relative to max|v| / shorter side


def conjugate_H(v: VField, base: Optional[Tuple[int, int]] = None, tol: Optional[float] = None) -> HarmonicConjugate:
    tol = settings().tol_divergence if tol is None else tol
    g = v.grid
    base = base or (g.n1 // 2, g.n2 // 2)
    div = divergence(v)
    interior = stencils.margin_mask(g.shape, FLUX_MARGIN)
    speed, side = flux_scale(v)
    worst = float(np.max(np.abs(div[interior]))) if np.any(interior) else 0.0
    relative = worst / (speed / side) if speed > 0.0 else worst
    if relative > tol:
        bad = interior & (np.abs(div) > tol * speed / side)
        raise DivergenceError(
            f"Flux is not divergence free: relative divergence {relative:.3e} > {tol:.1e} (u does not solve the equation)",
            nodes=[tuple(n) for n in np.argwhere(bad)],
        )
    path = two_path_integral(v.v2, -v.v1, g.h1, g.h2, base)
    logger.debug(f"[inverse] Conjugate H: relative divergence {relative:.3e}, path discrepancy {path.discrepancy:.3e}")
    return HarmonicConjugate(grid=g, values=path.values, discrepancy=path.discrepancy, divergence=relative)
