"""
Ordinary points: nodes where the gradient of J = det(u_ij) does not vanish.
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.construct.chart import Rect, largest_rectangle
from src.core import stencils
from src.core.config import settings
from src.potential.models import JoyceData
from src.verify.flux import fd_hessian
from src.verify.models import XGridSolution


@dataclass(frozen=True)
class OrdinaryMask:
    mask: np.ndarray
    grad_norm: np.ndarray
    threshold: float
    rect: Optional[Rect]

    @property
    def empty(self) -> bool:
        return self.rect is None


def solution_J(sol: XGridSolution) -> np.ndarray:
    """J carried by the solution, or the finite-difference Hessian determinant."""
    return sol.J if sol.J is not None else fd_hessian(sol.u, sol.grid).J


def ordinary_point_mask(
    sol: XGridSolution,
    jd: JoyceData,
    delta: Optional[float] = None,
    anchor: Optional[Tuple[int, int]] = None,
) -> OrdinaryMask:
    """|grad J| > delta * max|J| / (shorter side), with the largest rectangle around ``anchor``."""
    delta = settings().ordinary_delta if delta is None else delta
    g = sol.grid
    J = solution_J(sol)
    g1, g2 = stencils.gradient(J, g.h1, g.h2)
    grad = np.hypot(g1, g2)
    side = min(g.x1_range[1] - g.x1_range[0], g.x2_range[1] - g.x2_range[0])
    threshold = delta * float(np.max(np.abs(J))) / side
    mask = grad > threshold
    anchor = anchor or (g.n1 // 2, g.n2 // 2)
    rect = largest_rectangle(mask, anchor)
    if rect is not None and (rect[1] - rect[0] < 2 or rect[3] - rect[2] < 2):
        rect = None
    return OrdinaryMask(mask=mask, grad_norm=grad, threshold=threshold, rect=rect)
