"""
Domain types for the energy density psi and its Joyce data.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np

RealFn = Callable[[np.ndarray], np.ndarray]


class PotentialKind(Enum):
    LOGDET = "logdet"
    POWER = "power"
    AFFINE = "affine"
    CUSTOM = "custom"
    DUAL = "dual"


class WeightKind(Enum):
    LINEAR = "r"             # p(r) = r
    POWER = "r^gamma"        # p(r) = r^gamma
    EXPONENTIAL = "exp(r/2)"
    DUAL = "dual"            # p(r) = 1 / p_parent(-r)
    TABULATED = "tabulated"


class Provenance(Enum):
    CLOSED_FORM = "builtin-closed-form"
    QUADRATURE = "derived-by-quadrature"


@dataclass(frozen=True)
class Potential:
    """
    Energy density psi(J) with its first two derivatives.

    ``curvature_sign`` is the constant sign of psi'' on (0, inf).
    ``t_range`` bounds the sampled region (tabulated potentials only
    know psi on their table).
    """
    kind: PotentialKind
    name: str
    psi: RealFn
    psi1: RealFn
    psi2: RealFn
    curvature_sign: int
    alpha: Optional[float] = None
    parent: Optional["Potential"] = field(default=None, repr=False, compare=False)
    t_range: Tuple[float, float] = (1e-4, 1e4)


@dataclass(frozen=True)
class JoyceEval:
    p: np.ndarray
    p1: np.ndarray
    J: np.ndarray


@dataclass(frozen=True)
class JoyceData:
    """
    Weight p of the linear equation on the interval I = (lo, hi).

    ``r_of_J`` inverts r -> p(r)^-2; ``f_scale`` is the constant dr/df
    between this r and the normalization f'(t) = t^{1/2} psi''(t).
    ``q`` is a primitive of 1/p when known in closed form.
    """
    interval: Tuple[float, float]
    p: RealFn
    p1: RealFn
    r_of_J: RealFn
    J_range: Tuple[float, float]
    provenance: Provenance
    p_kind: WeightKind
    f_scale: float
    name: str
    exponent: Optional[float] = None
    q: Optional[RealFn] = field(default=None, repr=False)
    parent: Optional["JoyceData"] = field(default=None, repr=False, compare=False)

    def J(self, r: np.ndarray) -> np.ndarray:
        return np.asarray(self.p(r), dtype=float) ** -2

    @property
    def is_linear(self) -> bool:
        return self.p_kind == WeightKind.LINEAR

    @property
    def is_square(self) -> bool:
        return self.p_kind == WeightKind.POWER and self.exponent is not None and abs(self.exponent - 2.0) < 1e-12

    def contains(self, r: np.ndarray) -> np.ndarray:
        lo, hi = self.interval
        r = np.asarray(r, dtype=float)
        return (r > lo) & (r < hi)
