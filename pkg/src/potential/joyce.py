"""
Joyce data for a potential, and Legendre duality of potentials and weights.

f solves f'(t) = t^{1/2} psi''(t); p(r) = (f^{-1}(r))^{-1/2}, so that
J^{-1/2} = p(r) when r = f(J). Builtins use the canonical weights
(p = r, r^{1/(1-2 alpha)}, e^{r/2}, r^2), which differ from the direct
integral of f by an affine change of r recorded in ``f_scale``.
"""
from typing import Callable, Literal, Tuple

import numpy as np
from loguru import logger
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator

from src.core.errors import DomainError, InvalidPotentialError, QuadratureError, RangeError
from src.potential.models import (
    JoyceData,
    JoyceEval,
    Potential,
    PotentialKind,
    Provenance,
    WeightKind,
)

JoyceMode = Literal["closed-form", "quadrature"]

QUAD_ANCHOR = 1.0
TABLE_NODES = 801
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def validate_potential(pot: Potential, samples: int = 200) -> None:
    """Reject potentials whose psi'' leaves the declared sign on the sampled range."""
    lo, hi = pot.t_range
    t = np.clip(np.exp(np.linspace(np.log(lo), np.log(hi), samples)), lo, hi)
    curvature = np.asarray(pot.psi2(t), dtype=float)
    if not np.all(np.isfinite(curvature)):
        raise InvalidPotentialError(f"psi'' of '{pot.name}' is not finite on [{lo:.3g}, {hi:.3g}]")
    if np.any(np.sign(curvature) != pot.curvature_sign):
        raise InvalidPotentialError(f"psi'' of '{pot.name}' changes sign on the sampled range")


# =============================================================================
# Closed-form weights
# =============================================================================

def _linear_weight() -> JoyceData:
    return JoyceData(
        interval=(0.0, np.inf),
        p=lambda r: np.asarray(r, dtype=float),
        p1=lambda r: np.ones_like(np.asarray(r, dtype=float)),
        r_of_J=lambda J: np.asarray(J, dtype=float) ** -0.5,
        J_range=(0.0, np.inf),
        provenance=Provenance.CLOSED_FORM,
        p_kind=WeightKind.LINEAR,
        f_scale=-0.5,
        name="p(r)=r",
        exponent=1.0,
        q=lambda r: np.log(r),
    )


def _power_weight(gamma: float, f_scale: float) -> JoyceData:
    g = float(gamma)

    def _q(r):
        r = np.asarray(r, dtype=float)
        return r ** (1.0 - g) / (1.0 - g)

    return JoyceData(
        interval=(0.0, np.inf),
        p=lambda r: np.asarray(r, dtype=float) ** g,
        p1=lambda r: g * np.asarray(r, dtype=float) ** (g - 1.0),
        r_of_J=lambda J: np.asarray(J, dtype=float) ** (-0.5 / g),
        J_range=(0.0, np.inf),
        provenance=Provenance.CLOSED_FORM,
        p_kind=WeightKind.POWER,
        f_scale=f_scale,
        name=f"p(r)=r^{g:g}",
        exponent=g,
        q=_q,
    )


def _exponential_weight() -> JoyceData:
    return JoyceData(
        interval=(-np.inf, np.inf),
        p=lambda r: np.exp(0.5 * np.asarray(r, dtype=float)),
        p1=lambda r: 0.5 * np.exp(0.5 * np.asarray(r, dtype=float)),
        r_of_J=lambda J: -np.log(J),
        J_range=(0.0, np.inf),
        provenance=Provenance.CLOSED_FORM,
        p_kind=WeightKind.EXPONENTIAL,
        f_scale=-4.0,
        name="p(r)=e^{r/2}",
        q=lambda r: -2.0 * np.exp(-0.5 * np.asarray(r, dtype=float)),
    )


def _closed_form(pot: Potential) -> JoyceData:
    if pot.kind == PotentialKind.LOGDET:
        return _linear_weight()
    if pot.kind == PotentialKind.AFFINE:
        return _power_weight(2.0, f_scale=4.0 / 3.0)
    if pot.kind == PotentialKind.POWER:
        alpha = pot.alpha
        if abs(alpha - 0.5) < 1e-14:
            return _exponential_weight()
        beta = alpha - 0.5
        return _power_weight(1.0 / (1.0 - 2.0 * alpha), f_scale=beta / (alpha * (1.0 - alpha)))
    if pot.kind == PotentialKind.DUAL and pot.parent is not None:
        return dual_joyce(_closed_form(pot.parent))
    raise InvalidPotentialError(f"No closed-form Joyce data for '{pot.name}'; use quadrature mode")


# =============================================================================
# Quadrature-derived weights
# =============================================================================

class _QuadratureTable:
    """
    f on a table of t-nodes (adaptive quadrature per cell, f(anchor) = 0),
    evaluated between nodes by 16-point Gauss-Legendre on the partial cell.
    """

    def __init__(self, pot: Potential, nodes: int = TABLE_NODES):
        lo, hi = pot.t_range
        self.integrand: Callable[[np.ndarray], np.ndarray] = lambda s: np.sqrt(s) * pot.psi2(s)
        self.t = np.clip(np.exp(np.linspace(np.log(lo), np.log(hi), nodes)), lo, hi)

        cells = np.empty(nodes - 1)
        for k in range(nodes - 1):
            value, err = quad(self.integrand, self.t[k], self.t[k + 1], epsabs=0.0, epsrel=1e-13, limit=200)
            if not np.isfinite(value):
                raise QuadratureError(f"Quadrature of t^(1/2) psi'' failed on [{self.t[k]:.3g}, {self.t[k + 1]:.3g}]")
            cells[k] = value
        f = np.concatenate([[0.0], np.cumsum(cells)])
        anchor = QUAD_ANCHOR if lo <= QUAD_ANCHOR <= hi else lo
        self.f = f - self._partial(f, np.array([anchor]))[0]

        steps = np.diff(self.f)
        if not (np.all(steps > 0) or np.all(steps < 0)):
            raise InvalidPotentialError(f"f is not monotone for '{pot.name}'")
        self.increasing = bool(steps[0] > 0)
        order = slice(None) if self.increasing else slice(None, None, -1)
        self._log_t_of_r = PchipInterpolator(self.f[order], np.log(self.t[order]))

    def _partial(self, f_nodes: np.ndarray, t: np.ndarray) -> np.ndarray:
        k = np.clip(np.searchsorted(self.t, t, side="right") - 1, 0, self.t.size - 2)
        a = self.t[k]
        half = 0.5 * (t - a)
        s = (a + half)[:, None] + half[:, None] * _GL_X
        return f_nodes[k] + half * np.sum(self.integrand(s) * _GL_W, axis=-1)

    def f_of_t(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return self._partial(self.f, t.ravel()).reshape(t.shape)

    def t_of_r(self, r: np.ndarray, tol: float = 1e-15, maxiter: int = 60) -> np.ndarray:
        """Monotone bisection on the table refined with Newton steps."""
        r = np.asarray(r, dtype=float)
        flat = r.ravel()
        f_lo, f_hi = min(self.f[0], self.f[-1]), max(self.f[0], self.f[-1])
        valid = (flat > f_lo) & (flat < f_hi)
        out = np.full(flat.shape, np.nan)
        if not np.any(valid):
            return out.reshape(r.shape)
        target = flat[valid]
        sgn = 1.0 if self.increasing else -1.0

        if self.increasing:
            k = np.clip(np.searchsorted(self.f, target), 1, self.f.size - 1)
        else:
            k = np.clip(self.f.size - np.searchsorted(self.f[::-1], target), 1, self.f.size - 1)
        lo = self.t[k - 1].copy()
        hi = self.t[k].copy()
        t = np.clip(np.exp(self._log_t_of_r(target)), lo, hi)

        for _ in range(maxiter):
            F = self._partial(self.f, t) - target
            below = sgn * F < 0
            lo = np.where(below, t, lo)
            hi = np.where(below, hi, t)
            newton = t - F / self.integrand(t)
            inside = (newton > lo) & (newton < hi)
            t_next = np.where(inside, newton, 0.5 * (lo + hi))
            done = np.abs(t_next - t) <= tol * t
            t = t_next
            if np.all(done):
                break
        out[valid] = t
        return out.reshape(r.shape)


def _quadrature(pot: Potential) -> JoyceData:
    validate_potential(pot)
    table = _QuadratureTable(pot)
    lo, hi = sorted((float(table.f[0]), float(table.f[-1])))

    def _p(r):
        return table.t_of_r(r) ** -0.5

    def _p1(r):
        t = table.t_of_r(r)
        return -0.5 * t ** -1.5 / table.integrand(t)

    logger.debug(f"[potential] Quadrature Joyce data for '{pot.name}': I = ({lo:.6g}, {hi:.6g})")
    return JoyceData(
        interval=(lo, hi),
        p=_p,
        p1=_p1,
        r_of_J=table.f_of_t,
        J_range=(float(table.t[0]), float(table.t[-1])),
        provenance=Provenance.QUADRATURE,
        p_kind=WeightKind.TABULATED,
        f_scale=1.0,
        name=f"quadrature({pot.name})",
    )


# =============================================================================
# Public operations
# =============================================================================

def derive_joyce_data(pot: Potential, mode: JoyceMode = "closed-form") -> JoyceData:
    """Joyce data (I, p, f) of a potential."""
    if mode == "closed-form":
        if pot.kind == PotentialKind.CUSTOM:
            logger.info(f"[potential] '{pot.name}' has no closed form, deriving by quadrature")
            return _quadrature(pot)
        validate_potential(pot)
        return _closed_form(pot)
    if mode == "quadrature":
        return _quadrature(pot)
    raise InvalidPotentialError(f"Unknown Joyce mode '{mode}'")


def eval_joyce(jd: JoyceData, r) -> JoyceEval:
    """p(r), p'(r) and J(r) = p(r)^-2 for r strictly inside I."""
    r = np.asarray(r, dtype=float)
    inside = jd.contains(r)
    if not np.all(inside):
        bad = np.atleast_1d(r)[~np.atleast_1d(inside)]
        raise DomainError(f"r = {bad[:5].tolist()} outside I = {jd.interval} for {jd.name}")
    p = np.asarray(jd.p(r), dtype=float)
    return JoyceEval(p=p, p1=np.asarray(jd.p1(r), dtype=float), J=p**-2)


def f_of_J(jd: JoyceData, J) -> np.ndarray:
    """The unique r in I with p(r)^-2 = J."""
    J = np.asarray(J, dtype=float)
    lo, hi = jd.J_range
    ok = (J > lo) & (J < hi)
    if not np.all(ok):
        bad = np.atleast_1d(J)[~np.atleast_1d(ok)]
        raise RangeError(f"J = {bad[:5].tolist()} outside the range {jd.J_range} of {jd.name}")
    return np.asarray(jd.r_of_J(J), dtype=float)


def dual_potential(pot: Potential) -> Potential:
    """psi*(t) = t psi(1/t); the dual of a dual is the original potential."""
    if pot.kind == PotentialKind.DUAL and pot.parent is not None:
        return pot.parent

    def _psi(t):
        t = np.asarray(t, dtype=float)
        return t * pot.psi(1.0 / t)

    def _psi1(t):
        t = np.asarray(t, dtype=float)
        return pot.psi(1.0 / t) - pot.psi1(1.0 / t) / t

    def _psi2(t):
        t = np.asarray(t, dtype=float)
        return t**-3 * pot.psi2(1.0 / t)

    lo, hi = pot.t_range
    return Potential(
        kind=PotentialKind.DUAL,
        name=f"dual({pot.name})",
        psi=_psi,
        psi1=_psi1,
        psi2=_psi2,
        curvature_sign=pot.curvature_sign,
        alpha=None,
        parent=pot,
        t_range=(1.0 / hi, 1.0 / lo),
    )


def _reciprocal_range(J_range: Tuple[float, float]) -> Tuple[float, float]:
    lo, hi = J_range
    with np.errstate(divide="ignore"):
        return (float(np.float64(1.0) / hi), float(np.float64(1.0) / lo))


def dual_joyce(jd: JoyceData) -> JoyceData:
    """Weight r -> p(-r)^-1 on -I; the dual of a dual is the original data."""
    if jd.p_kind == WeightKind.DUAL and jd.parent is not None:
        return jd.parent
    lo, hi = jd.interval

    def _p(r):
        return 1.0 / jd.p(-np.asarray(r, dtype=float))

    def _p1(r):
        r = np.asarray(r, dtype=float)
        return jd.p1(-r) / jd.p(-r) ** 2

    def _r_of_J(J):
        return -jd.r_of_J(1.0 / np.asarray(J, dtype=float))

    return JoyceData(
        interval=(-hi, -lo),
        p=_p,
        p1=_p1,
        r_of_J=_r_of_J,
        J_range=_reciprocal_range(jd.J_range),
        provenance=jd.provenance,
        p_kind=WeightKind.DUAL,
        f_scale=jd.f_scale,
        name=f"dual({jd.name})",
        parent=jd,
    )
