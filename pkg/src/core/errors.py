"""
Exception hierarchy for the Joyce construction toolkit.

Every error carries the CLI exit code it maps to:
- InputError        -> 2 (invalid input / config)
- CheckFailure      -> 1 (checks ran but failed tolerance)
- NumericalFailure  -> 3 (Newton / ODE / quadrature breakdown)
"""
from typing import Iterable, List, Optional, Tuple

MAX_REPORTED_NODES = 20


class JoyceError(Exception):
    """Base class for all toolkit errors."""
    exit_code: int = 3

    def __init__(self, message: str, nodes: Optional[Iterable[Tuple[int, ...]]] = None):
        self.nodes: List[Tuple[int, ...]] = [tuple(int(i) for i in n) for n in (nodes or [])][:MAX_REPORTED_NODES]
        if self.nodes:
            message = f"{message} (nodes: {self.nodes})"
        super().__init__(message)


# =============================================================================
# Invalid input (exit 2)
# =============================================================================

class InputError(JoyceError, ValueError):
    exit_code = 2


class ConfigError(InputError):
    pass


class DomainError(InputError):
    """A radial coordinate lies outside the interval I."""


class RangeError(InputError):
    """A Hessian determinant lies outside the range of r -> p(r)^-2."""


class InvalidPotentialError(InputError):
    pass


class IncompatibleSeedError(InputError):
    pass


class GridMismatchError(InputError):
    pass


class HashMismatchError(InputError):
    pass


class OutsideImageError(InputError):
    """A resampling target lies outside the image of the map being inverted."""


# =============================================================================
# Checks that ran and failed (exit 1)
# =============================================================================

class CheckFailure(JoyceError):
    exit_code = 1


class ClosednessError(CheckFailure):
    pass


class NondegeneracyError(CheckFailure):
    pass


class NonConvexError(CheckFailure):
    pass


class NonHarmonicError(CheckFailure):
    pass


class DivergenceError(CheckFailure):
    pass


class NoOrdinaryPointsError(CheckFailure):
    pass


class FoldOverError(CheckFailure):
    pass


class ResidualToleranceError(CheckFailure):
    pass


class RouteInconsistencyError(CheckFailure):
    pass


# =============================================================================
# Numerical breakdown (exit 3)
# =============================================================================

class NumericalFailure(JoyceError):
    exit_code = 3


class NewtonError(NumericalFailure):
    pass


class ODEError(NumericalFailure):
    pass


class SingularJacobianError(NumericalFailure):
    pass


class QuadratureError(NumericalFailure):
    pass
