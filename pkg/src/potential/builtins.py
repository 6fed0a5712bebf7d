"""
Builtin potentials, tabulated potentials, and the potential spec parser.

Spec strings: ``logdet``, ``power:<alpha>``, ``affine``, ``file:<path>``.
"""
from pathlib import Path

import numpy as np
import pandas as pd
from loguru import logger
from scipy.interpolate import PchipInterpolator

from src.core.errors import InvalidPotentialError
from src.potential.models import Potential, PotentialKind


def logdet() -> Potential:
    """psi(t) = -log t."""
    return Potential(
        kind=PotentialKind.LOGDET,
        name="logdet",
        psi=lambda t: -np.log(t),
        psi1=lambda t: -1.0 / np.asarray(t, dtype=float),
        psi2=lambda t: np.asarray(t, dtype=float) ** -2,
        curvature_sign=1,
    )


def power(alpha: float) -> Potential:
    """psi(t) = -t^alpha for alpha in (0, 1)."""
    if not 0.0 < alpha < 1.0:
        raise InvalidPotentialError(f"power potential needs alpha in (0, 1), got {alpha}")
    a = float(alpha)
    return Potential(
        kind=PotentialKind.POWER,
        name=f"power:{a!r}",
        psi=lambda t: -np.asarray(t, dtype=float) ** a,
        psi1=lambda t: -a * np.asarray(t, dtype=float) ** (a - 1.0),
        psi2=lambda t: a * (1.0 - a) * np.asarray(t, dtype=float) ** (a - 2.0),
        curvature_sign=1,
        alpha=a,
    )


def affine() -> Potential:
    """psi(t) = t^{1/4}: graphs of critical points are affine maximal surfaces."""
    return Potential(
        kind=PotentialKind.AFFINE,
        name="affine",
        psi=lambda t: np.asarray(t, dtype=float) ** 0.25,
        psi1=lambda t: 0.25 * np.asarray(t, dtype=float) ** -0.75,
        psi2=lambda t: -0.1875 * np.asarray(t, dtype=float) ** -1.75,
        curvature_sign=-1,
        alpha=0.25,
    )


def tabulated(t: np.ndarray, psi: np.ndarray, name: str = "custom") -> Potential:
    """
    Potential known on a log-spaced table of (t, psi(t)).

    Interpolation is monotone cubic (PCHIP) in s = log t, so
    psi'(t) = g'(s)/t and psi''(t) = (g''(s) - g'(s))/t^2 with g(s) = psi(e^s).
    Outside the table every function returns NaN.
    """
    t = np.asarray(t, dtype=float)
    psi = np.asarray(psi, dtype=float)
    if t.ndim != 1 or t.shape != psi.shape or t.size < 4:
        raise InvalidPotentialError("tabulated potential needs at least 4 (t, psi) pairs")
    if np.any(t <= 0) or np.any(np.diff(t) <= 0):
        raise InvalidPotentialError("tabulated t must be positive and strictly increasing")
    if not np.all(np.isfinite(psi)):
        raise InvalidPotentialError("tabulated psi must be finite")

    g = PchipInterpolator(np.log(t), psi, extrapolate=False)
    g1 = g.derivative(1)
    g2 = g.derivative(2)

    def _psi(x):
        return g(np.log(np.asarray(x, dtype=float)))

    def _psi1(x):
        x = np.asarray(x, dtype=float)
        return g1(np.log(x)) / x

    def _psi2(x):
        x = np.asarray(x, dtype=float)
        s = np.log(x)
        return (g2(s) - g1(s)) / x**2

    samples = np.clip(np.exp(np.linspace(np.log(t[0]), np.log(t[-1]), 8 * t.size)), t[0], t[-1])
    curvature = _psi2(samples)
    sign = int(np.sign(np.nanmedian(curvature)))
    if sign == 0 or np.any(np.sign(curvature) != sign):
        raise InvalidPotentialError(f"psi'' changes sign on the tabulated range of '{name}'")

    logger.debug(f"[potential] Tabulated '{name}' on t in [{t[0]:.3g}, {t[-1]:.3g}] ({t.size} points)")
    return Potential(
        kind=PotentialKind.CUSTOM,
        name=name,
        psi=_psi,
        psi1=_psi1,
        psi2=_psi2,
        curvature_sign=sign,
        t_range=(float(t[0]), float(t[-1])),
    )


def from_csv(path: str) -> Potential:
    """Load a two-column CSV with header ``t,psi``."""
    p = Path(path)
    if not p.exists():
        raise InvalidPotentialError(f"Potential table {path} not found")
    frame = pd.read_csv(p)
    if not {"t", "psi"} <= set(frame.columns):
        raise InvalidPotentialError(f"Potential table {path} needs columns 't,psi'")
    frame = frame.sort_values("t")
    return tabulated(frame["t"].to_numpy(), frame["psi"].to_numpy(), name=f"file:{path}")


def parse_potential(spec: str) -> Potential:
    """Build a Potential from its spec string."""
    spec = spec.strip()
    if spec == "logdet":
        return logdet()
    if spec == "affine":
        return affine()
    if spec.startswith("power:"):
        try:
            alpha = float(spec.split(":", 1)[1])
        except ValueError as e:
            raise InvalidPotentialError(f"Invalid power exponent in '{spec}'") from e
        return power(alpha)
    if spec.startswith("file:"):
        return from_csv(spec.split(":", 1)[1])
    raise InvalidPotentialError(f"Unknown potential spec '{spec}' (use logdet, power:<alpha>, affine, file:<path>)")
