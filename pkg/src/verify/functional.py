"""
The discrete functional F(u) = integral of psi(J) and its first variation
along compactly supported perturbations.
"""
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from loguru import logger
from scipy.integrate import trapezoid

from src.core.errors import ConfigError, NonConvexError
from src.potential.models import Potential
from src.verify.flux import fd_hessian
from src.verify.models import XGrid, XGridSolution

COLLAR = 2


@dataclass(frozen=True)
class FirstVariation:
    value: float
    derivative: float
    step: float
    phi_max: float


def functional_value(u: np.ndarray, grid: XGrid, pot: Potential) -> float:
    """Trapezoid quadrature of psi(J) over the nodes one away from the edge."""
    hess = fd_hessian(u, grid)
    inner = (slice(1, -1), slice(1, -1))
    if not np.all(hess.positive[inner]):
        raise NonConvexError("u is not convex on the interior", nodes=[tuple(n + 1) for n in np.argwhere(~hess.positive[inner])])
    density = np.asarray(pot.psi(hess.J[inner]), dtype=float)
    return float(trapezoid(trapezoid(density, dx=grid.h2, axis=1), dx=grid.h1, axis=0))


def _convex_along(u: np.ndarray, phi: np.ndarray, grid: XGrid, s: float) -> bool:
    inner = (slice(1, -1), slice(1, -1))
    return all(bool(np.all(fd_hessian(u + sign * s * phi, grid).positive[inner])) for sign in (1.0, -1.0))


def functional_and_first_variation(
    sol: XGridSolution,
    pot: Potential,
    phi: np.ndarray,
    step: float = 1e-3,
    max_halvings: int = 10,
) -> FirstVariation:
    """
    F(u) and the central difference (F(u + s phi) - F(u - s phi)) / 2s.
    The step is halved while u +- s phi loses convexity.
    """
    phi = np.asarray(phi, dtype=float)
    if phi.shape != sol.grid.shape:
        raise ConfigError(f"Perturbation shape {phi.shape} does not match grid {sol.grid.shape}")
    collar = np.ones(phi.shape, dtype=bool)
    collar[COLLAR:-COLLAR, COLLAR:-COLLAR] = False
    if np.any(phi[collar] != 0.0):
        raise ConfigError(f"Perturbation must vanish on a {COLLAR}-node boundary collar")

    s = float(step)
    for _ in range(max_halvings + 1):
        if _convex_along(sol.u, phi, sol.grid, s):
            break
        logger.warning(f"[verify] u +- {s:.2e} phi is not convex, halving the step")
        s *= 0.5
    else:
        raise NonConvexError(f"Convexity lost for every step down to {s:.2e}")

    value = functional_value(sol.u, sol.grid, pot)
    plus = functional_value(sol.u + s * phi, sol.grid, pot)
    minus = functional_value(sol.u - s * phi, sol.grid, pot)
    return FirstVariation(value=value, derivative=(plus - minus) / (2.0 * s), step=s, phi_max=float(np.max(np.abs(phi))))


def compact_bumps(
    grid: XGrid,
    count: int,
    seed: int = 0,
    radius: Tuple[float, float] = (0.3, 0.45),
    rng: Optional[np.random.Generator] = None,
) -> List[np.ndarray]:
    """
    Smooth nonnegative bumps (1 - rho^2)^4 with random centres and radii
    (fractions of the shorter side), supported away from the collar.
    """
    rng = rng or np.random.default_rng(seed)
    X1, X2 = grid.mesh()
    side = min(grid.x1_range[1] - grid.x1_range[0], grid.x2_range[1] - grid.x2_range[0])
    margin = (COLLAR + 1) * max(grid.h1, grid.h2)
    bumps = []
    for _ in range(count):
        R = rng.uniform(*radius) * side
        R = min(R, 0.5 * side - margin)
        c1 = rng.uniform(grid.x1_range[0] + margin + R, grid.x1_range[1] - margin - R)
        c2 = rng.uniform(grid.x2_range[0] + margin + R, grid.x2_range[1] - margin - R)
        rho2 = ((X1 - c1) ** 2 + (X2 - c2) ** 2) / R**2
        phi = np.where(rho2 < 1.0, (1.0 - rho2) ** 4, 0.0)
        phi[:COLLAR, :] = phi[-COLLAR:, :] = 0.0
        phi[:, :COLLAR] = phi[:, -COLLAR:] = 0.0
        bumps.append(phi)
    return bumps
