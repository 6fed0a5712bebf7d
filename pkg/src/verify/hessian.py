"""
Hessian of u in x-coordinates from the chart Jacobians: (u_ij) = B A^-1.
"""
from dataclasses import dataclass

import numpy as np
from loguru import logger

from src.construct.chart import Chart
from src.core.errors import SingularJacobianError


@dataclass(frozen=True)
class ChainHessian:
    field: np.ndarray          # (nH, nr, 2, 2)
    symmetry_defect: float     # max |u12 - u21|
    det_defect: float          # max |det / J - 1|


def hessian_via_chain(chart: Chart, rtol: float = 1e-14) -> ChainHessian:
    scale = np.max(np.abs(chart.A), axis=(-2, -1)) ** 2
    singular = np.abs(chart.detA) <= rtol * np.maximum(scale, 1e-300)
    if np.any(singular):
        raise SingularJacobianError(
            f"dx/d(H, r) is singular at {int(singular.sum())} chart nodes",
            nodes=[tuple(n) for n in np.argwhere(singular)],
        )
    hess = chart.B @ np.linalg.inv(chart.A)
    symmetry = float(np.max(np.abs(hess[..., 0, 1] - hess[..., 1, 0])))
    det = np.linalg.det(hess)
    det_defect = float(np.max(np.abs(det / chart.J - 1.0)))
    logger.debug(f"[verify] Chain-rule Hessian: symmetry defect {symmetry:.3e}, det defect {det_defect:.3e}")
    return ChainHessian(field=hess, symmetry_defect=symmetry, det_defect=det_defect)
