"""
The Chern-Terng system dZ/dl1 = F x dF/dl2, dZ/dl2 = -F x dF/dl1 for a
harmonic triple F. Its consistency defect is F x Laplacian(F).
"""
from typing import Optional, Tuple

import numpy as np

from src.affine.harmonic import HarmonicTriple
from src.affine.surface import Surface, integrate_surface


def chern_terng_integrate(
    triple: HarmonicTriple,
    base: Optional[Tuple[int, int]] = None,
    tol: Optional[float] = None,
) -> Surface:
    triple.require_harmonic(tol)
    F, jet = triple.stacked()
    a = np.cross(F, jet.dr)
    b = -np.cross(F, jet.dH)
    twist = np.cross(jet.dH, jet.dr)
    a_d0 = twist + np.cross(F, jet.dHr)
    b_d1 = twist - np.cross(F, jet.dHr)
    consistency = np.cross(F, jet.dHH + jet.drr)
    name = f"chern-terng({', '.join(f.name for f in triple.members)})"
    return integrate_surface(triple.grid, a, b, a_d0, b_d1, consistency, base, name)
