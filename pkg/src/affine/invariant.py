"""
The affine invariant of a graph z = u(x): K^{1/4} dA = J^{1/4} dx1 dx2, and
invariance of J under unimodular maps of the domain.
"""
from typing import Optional, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel

from src.core import stencils
from src.core.config import settings
from src.inverse.inversion import spline
from src.verify.flux import fd_hessian
from src.verify.models import XGrid, XGridSolution
from src.verify.resample import inscribed_box

SHEAR = ((1.0, 1.0), (0.0, 1.0))


class AffineInvariantReport(BaseModel):
    identity_defect: float       # max |K^{1/4} sqrt(1 + |grad u|^2) - J^{1/4}| / max J^{1/4}
    unimodular_defect: float     # max |J(M^-1 y) - J~(y)| / max J
    det_M: float
    tolerance: float
    passed: bool


def curvature_identity(sol: XGridSolution) -> Tuple[np.ndarray, np.ndarray]:
    """(K^{1/4} times the area density, J^{1/4}) per interior node, from shared FD derivatives."""
    g = sol.grid
    hess = fd_hessian(sol.u, g)
    u1, u2 = stencils.gradient(sol.u, g.h1, g.h2)
    interior = stencils.margin_mask(g.shape, 1) & hess.positive
    J = hess.J[interior]
    w = 1.0 + u1[interior] ** 2 + u2[interior] ** 2
    K = J / w**2
    return K**0.25 * np.sqrt(w), J**0.25


def unimodular_defect(sol: XGridSolution, M=SHEAR) -> float:
    """
    Samples u~(y) = u(M^-1 y) on a grid inscribed in M(domain) and compares
    its FD determinant with J of u at the corresponding points.
    """
    M = np.asarray(M, dtype=float)
    Minv = np.linalg.inv(M)
    g = sol.grid
    X1, X2 = g.mesh()
    Y1 = M[0, 0] * X1 + M[0, 1] * X2
    Y2 = M[1, 0] * X1 + M[1, 1] * X2
    target = XGrid.from_box(inscribed_box(Y1, Y2), g.n1, g.n2)
    T1, T2 = target.mesh()
    P1 = Minv[0, 0] * T1 + Minv[0, 1] * T2
    P2 = Minv[1, 0] * T1 + Minv[1, 1] * T2

    u_tilde = spline(g, sol.u).ev(P1, P2)
    J_tilde = fd_hessian(u_tilde, target).J
    J_back = spline(g, fd_hessian(sol.u, g).J).ev(P1, P2)
    mask = stencils.margin_mask(target.shape, 2)
    scale = max(float(np.max(np.abs(J_back[mask]))), 1e-300)
    return float(np.max(np.abs(J_tilde - J_back)[mask])) / scale


def affine_invariant_check(sol: XGridSolution, M=SHEAR, tol: Optional[float] = None) -> AffineInvariantReport:
    tol = settings().tol_residual if tol is None else tol
    lhs, rhs = curvature_identity(sol)
    identity = float(np.max(np.abs(lhs - rhs)) / max(float(np.max(rhs)), 1e-300)) if rhs.size else 0.0
    shear = unimodular_defect(sol, M)
    det_M = float(np.linalg.det(np.asarray(M, dtype=float)))
    passed = identity <= 1e-12 and shear <= tol and abs(det_M - 1.0) <= 1e-12
    logger.info(
        f"[affine] Affine invariant of '{sol.name}': identity {identity:.2e}, unimodular {shear:.2e} -> {'PASS' if passed else 'FAIL'}"
    )
    return AffineInvariantReport(identity_defect=identity, unimodular_defect=shear, det_M=det_M, tolerance=tol, passed=passed)
