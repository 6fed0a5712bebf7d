"""
Finite-difference stencils and residual norms shared by every module.

Conventions:
- arrays are indexed [i, j] with axis 0 the first coordinate (H or x1)
  and axis 1 the second (r or x2);
- first derivatives are second-order central in the interior (numpy.gradient)
  and third-order one-sided (4-point) on the edges;
- second derivatives use the 3-point interior stencil and the 5-point
  third-order one-sided stencil on the edges;
- a flux differenced from derived edge values (v from J) stays second
  order up to the edge; its divergence is second order only three nodes in;
- mixed derivatives are the composition of two first derivatives, which
  in the interior is the 4-point cross stencil.
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np


def d1(values: np.ndarray, h: float, axis: int) -> np.ndarray:
    """First derivative along ``axis``."""
    out = np.gradient(values, h, axis=axis, edge_order=2)
    v = np.moveaxis(np.asarray(values, dtype=float), axis, 0)
    if v.shape[0] < 4:
        return out
    edge = np.moveaxis(out, axis, 0)
    edge[0] = (-11.0 * v[0] + 18.0 * v[1] - 9.0 * v[2] + 2.0 * v[3]) / (6.0 * h)
    edge[-1] = (11.0 * v[-1] - 18.0 * v[-2] + 9.0 * v[-3] - 2.0 * v[-4]) / (6.0 * h)
    return out


def d2(values: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Second derivative along ``axis``."""
    v = np.moveaxis(np.asarray(values, dtype=float), axis, 0)
    n = v.shape[0]
    if n < 3:
        raise ValueError("second derivative needs at least 3 nodes")
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / h**2
    if n >= 5:
        out[0] = (35.0 * v[0] - 104.0 * v[1] + 114.0 * v[2] - 56.0 * v[3] + 11.0 * v[4]) / (12.0 * h**2)
        out[-1] = (35.0 * v[-1] - 104.0 * v[-2] + 114.0 * v[-3] - 56.0 * v[-4] + 11.0 * v[-5]) / (12.0 * h**2)
    elif n == 4:
        out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h**2
        out[-1] = (2.0 * v[-1] - 5.0 * v[-2] + 4.0 * v[-3] - v[-4]) / h**2
    else:
        out[0] = out[1]
        out[-1] = out[1]
    return np.moveaxis(out, 0, axis)


def mixed(values: np.ndarray, h0: float, h1: float) -> np.ndarray:
    """Mixed second derivative d^2/d(axis0)d(axis1)."""
    return d1(d1(values, h0, 0), h1, 1)


def gradient(values: np.ndarray, h0: float, h1: float) -> Tuple[np.ndarray, np.ndarray]:
    return d1(values, h0, 0), d1(values, h1, 1)


def hessian(values: np.ndarray, h0: float, h1: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (f_00, f_01, f_11) on the full grid."""
    return d2(values, h0, 0), mixed(values, h0, h1), d2(values, h1, 1)


def margin_mask(shape: Tuple[int, int], margin: int) -> np.ndarray:
    """Boolean mask of nodes at least ``margin`` nodes away from every edge."""
    mask = np.zeros(shape, dtype=bool)
    n0, n1 = shape
    if n0 > 2 * margin and n1 > 2 * margin:
        mask[margin:n0 - margin, margin:n1 - margin] = True
    return mask


@dataclass(frozen=True)
class Norms:
    linf: float
    l2: float
    count: int


def norms(field: np.ndarray, h0: float, h1: float, mask: Optional[np.ndarray] = None) -> Norms:
    """
    L-infinity and discrete L2 norm (sqrt(sum f^2 h0 h1)) over ``mask``.

    Summation order is fixed by numpy's pairwise reduction over a
    C-ordered copy, so equal inputs give bitwise-equal norms.
    """
    f = np.asarray(field, dtype=float)
    if mask is not None:
        f = f[mask]
    f = np.ascontiguousarray(f).ravel()
    if f.size == 0:
        return Norms(linf=0.0, l2=0.0, count=0)
    linf = float(np.max(np.abs(f)))
    l2 = float(np.sqrt(np.sum(f * f) * h0 * h1))
    return Norms(linf=linf, l2=l2, count=int(f.size))


def box_mask(c0: np.ndarray, c1: np.ndarray, box: Optional[Tuple[float, float, float, float]]) -> np.ndarray:
    """Nodes whose coordinates lie inside the physical box (lo0, hi0, lo1, hi1)."""
    if box is None:
        return np.ones(np.broadcast(c0, c1).shape, dtype=bool)
    lo0, hi0, lo1, hi1 = box
    eps = 1e-12 * max(1.0, abs(hi0 - lo0), abs(hi1 - lo1))
    return (c0 >= lo0 - eps) & (c0 <= hi0 + eps) & (c1 >= lo1 - eps) & (c1 <= hi1 + eps)
