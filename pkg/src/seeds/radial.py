"""
Radial profiles of separable solutions xi = cos(kH + phase) R(r).

(p R')' = k^2 p R is integrated as the first-order system
R' = Q/p, Q' = k^2 p R with classical RK4.
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from loguru import logger

from src.core.errors import DomainError, ODEError
from src.potential.models import JoyceData


@dataclass(frozen=True)
class RadialProfile:
    r: np.ndarray
    R: np.ndarray
    dR: np.ndarray
    d2R: np.ndarray
    k: float
    substeps: int


def _weight(jd: JoyceData, r: float) -> float:
    p = float(jd.p(np.asarray(r)))
    if not (np.isfinite(p) and p > 0.0):
        raise ODEError(f"Weight p vanishes or is undefined at r = {r:.6g}")
    return p


def solve_radial_mode(
    k: float,
    jd: JoyceData,
    r_range: Tuple[float, float],
    init: Tuple[float, float],
    n: int,
    substeps: int = 4,
) -> RadialProfile:
    """
    Integrate from r_range[0] with (R, R') = init, recording the profile
    at the ``n`` equally spaced nodes of r_range. The RK4 step is
    (node spacing) / substeps.
    """
    r0, r1 = float(r_range[0]), float(r_range[1])
    lo, hi = jd.interval
    if not (r0 > lo and r1 < hi):
        raise DomainError(f"r-range [{r0}, {r1}] not strictly inside I = ({lo}, {hi})")
    if n < 2 or substeps < 1:
        raise ODEError(f"Need n >= 2 nodes and substeps >= 1, got n={n}, substeps={substeps}")

    nodes = np.linspace(r0, r1, n)
    step = (nodes[1] - nodes[0]) / substeps
    if step <= 1e-14 * max(1.0, abs(r0), abs(r1)):
        raise ODEError(f"RK4 step {step:.3e} underflows on [{r0}, {r1}]")
    k2 = float(k) ** 2

    def rhs(r: float, R: float, Q: float) -> Tuple[float, float]:
        p = _weight(jd, r)
        return Q / p, k2 * p * R

    R = np.empty(n)
    Q = np.empty(n)
    R[0] = float(init[0])
    Q[0] = _weight(jd, r0) * float(init[1])
    y_R, y_Q = R[0], Q[0]
    for m in range(n - 1):
        for s in range(substeps):
            r = nodes[m] + s * step
            k1R, k1Q = rhs(r, y_R, y_Q)
            k2R, k2Q = rhs(r + 0.5 * step, y_R + 0.5 * step * k1R, y_Q + 0.5 * step * k1Q)
            k3R, k3Q = rhs(r + 0.5 * step, y_R + 0.5 * step * k2R, y_Q + 0.5 * step * k2Q)
            k4R, k4Q = rhs(r + step, y_R + step * k3R, y_Q + step * k3Q)
            y_R += step / 6.0 * (k1R + 2.0 * k2R + 2.0 * k3R + k4R)
            y_Q += step / 6.0 * (k1Q + 2.0 * k2Q + 2.0 * k3Q + k4Q)
        if not (np.isfinite(y_R) and np.isfinite(y_Q)):
            raise ODEError(f"Radial mode k={k} diverged near r = {nodes[m + 1]:.6g}")
        R[m + 1] = y_R
        Q[m + 1] = y_Q

    p = np.asarray(jd.p(nodes), dtype=float)
    dR = Q / p
    d2R = k2 * R - np.asarray(jd.p1(nodes), dtype=float) / p * dR
    logger.debug(f"[seeds] Radial mode k={k:g} on [{r0:g}, {r1:g}]: {n} nodes, step {step:.3e}")
    return RadialProfile(r=nodes, R=R, dR=dR, d2R=d2R, k=float(k), substeps=substeps)
