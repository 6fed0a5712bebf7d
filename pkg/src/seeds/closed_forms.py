"""
Named closed-form functions of (H, r) with exact 2-jets.

Requirements on the weight:
    any      H, radial, Hq, H2 (the last is not a solution)
    p = r    logr, H2-r2/2, pointsource
    p = r^2  H/r, H2/r-r
"""
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from src.core.errors import IncompatibleSeedError
from src.potential.models import JoyceData, RealFn
from src.seeds.fields import ClosedForm, Jet

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_PANELS = 8


def _broadcast(H, r) -> Tuple[np.ndarray, np.ndarray]:
    H, r = np.broadcast_arrays(np.asarray(H, dtype=float), np.asarray(r, dtype=float))
    return H, r


def coordinate_H() -> ClosedForm:
    def form(H, r):
        H, r = _broadcast(H, r)
        z = np.zeros_like(H)
        return H.copy(), Jet(np.ones_like(H), z, z, z, z)
    return form


def log_r() -> ClosedForm:
    def form(H, r):
        H, r = _broadcast(H, r)
        z = np.zeros_like(H)
        return np.log(r), Jet(z, 1.0 / r, z, z, -1.0 / r**2)
    return form


def H_squared() -> ClosedForm:
    def form(H, r):
        H, r = _broadcast(H, r)
        z = np.zeros_like(H)
        return H**2, Jet(2.0 * H, z, np.full_like(H, 2.0), z, z)
    return form


def H_squared_minus_half_r_squared() -> ClosedForm:
    def form(H, r):
        H, r = _broadcast(H, r)
        z = np.zeros_like(H)
        return H**2 - 0.5 * r**2, Jet(2.0 * H, -r, np.full_like(H, 2.0), z, -np.ones_like(H))
    return form


def H_over_r() -> ClosedForm:
    def form(H, r):
        H, r = _broadcast(H, r)
        z = np.zeros_like(H)
        return H / r, Jet(1.0 / r, -H / r**2, z, -1.0 / r**2, 2.0 * H / r**3)
    return form


def H_squared_over_r_minus_r() -> ClosedForm:
    def form(H, r):
        H, r = _broadcast(H, r)
        return H**2 / r - r, Jet(
            dH=2.0 * H / r,
            dr=-(H**2) / r**2 - 1.0,
            dHH=2.0 / r,
            dHr=-2.0 * H / r**2,
            drr=2.0 * H**2 / r**3,
        )
    return form


def point_source(Hc: float) -> ClosedForm:
    """Axisymmetric Newtonian potential ((H - Hc)^2 + r^2)^(-1/2)."""
    def form(H, r):
        H, r = _broadcast(H, r)
        s = H - Hc
        rho2 = s**2 + r**2
        m3 = rho2**-1.5
        m5 = rho2**-2.5
        return rho2**-0.5, Jet(
            dH=-s * m3,
            dr=-r * m3,
            dHH=-m3 + 3.0 * s**2 * m5,
            dHr=3.0 * s * r * m5,
            drr=-m3 + 3.0 * r**2 * m5,
        )
    return form


# =============================================================================
# Radial primitive q(r) = integral of 1/p
# =============================================================================

def _reference_point(jd: JoyceData) -> float:
    lo, hi = jd.interval
    if lo < 1.0 < hi:
        return 1.0
    if np.isfinite(lo) and np.isfinite(hi):
        return 0.5 * (lo + hi)
    return lo + 1.0 if np.isfinite(lo) else hi - 1.0


def reciprocal_primitive(jd: JoyceData) -> RealFn:
    """
    q with q' = 1/p: the builtin closed form when known, otherwise
    composite Gauss-Legendre quadrature from a fixed reference point.
    """
    if jd.q is not None:
        return jd.q
    r_ref = _reference_point(jd)
    edges = np.linspace(0.0, 1.0, _PANELS + 1)

    def q(r):
        r = np.asarray(r, dtype=float)
        span = r - r_ref
        a = r_ref + span[..., None] * edges[:-1]
        half = 0.5 * span[..., None] / _PANELS
        s = (a + half)[..., None] + half[..., None] * _GL_X
        return np.sum(half * np.sum(_GL_W / jd.p(s), axis=-1), axis=-1)

    return q


def radial(jd: JoyceData) -> ClosedForm:
    q = reciprocal_primitive(jd)

    def form(H, r):
        H, r = _broadcast(H, r)
        p = jd.p(r)
        z = np.zeros_like(H)
        return q(r), Jet(z, 1.0 / p, z, z, -jd.p1(r) / p**2)
    return form


def H_times_radial(jd: JoyceData) -> ClosedForm:
    """H q(r): a solution for every weight, since (p (Hq)_r)_r = (H)_r = 0."""
    q = reciprocal_primitive(jd)

    def form(H, r):
        H, r = _broadcast(H, r)
        p = jd.p(r)
        return H * q(r), Jet(
            dH=q(r),
            dr=H / p,
            dHH=np.zeros_like(H),
            dHr=1.0 / p,
            drr=-H * jd.p1(r) / p**2,
        )
    return form


# =============================================================================
# Registry
# =============================================================================

_Builder = Callable[[JoyceData], ClosedForm]

NAMED_FORMS: Dict[str, Tuple[_Builder, Optional[str]]] = {
    "H": (lambda jd: coordinate_H(), None),
    "logr": (lambda jd: log_r(), "linear"),
    "radial": (radial, None),
    "Hq": (H_times_radial, None),
    "H2": (lambda jd: H_squared(), None),
    "H2-r2/2": (lambda jd: H_squared_minus_half_r_squared(), "linear"),
    "H/r": (lambda jd: H_over_r(), "square"),
    "H2/r-r": (lambda jd: H_squared_over_r_minus_r(), "square"),
}


def require_weight(jd: JoyceData, requirement: Optional[str], what: str) -> None:
    if requirement == "linear" and not jd.is_linear:
        raise IncompatibleSeedError(f"'{what}' needs p(r) = r, got {jd.name}")
    if requirement == "square" and not jd.is_square:
        raise IncompatibleSeedError(f"'{what}' needs p(r) = r^2, got {jd.name}")


def named_form(name: str, jd: JoyceData) -> ClosedForm:
    if name not in NAMED_FORMS:
        raise IncompatibleSeedError(f"Unknown closed form '{name}' (known: {', '.join(NAMED_FORMS)})")
    builder, requirement = NAMED_FORMS[name]
    require_weight(jd, requirement, name)
    return builder(jd)
