"""
Chart assembly: (x1, x2, u) from a seed pair, with Jacobians

    A[i, a] = dx_i / d lambda_a,    B[i, a] = d xi_i / d lambda_a,

lambda = (H, r), and the algebraic identities they satisfy.
"""
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel

from src.core.config import settings
from src.core.errors import DomainError, GridMismatchError, NondegeneracyError
from src.construct.forms import OneForm, build_forms, integrate_potential
from src.potential.models import JoyceData
from src.seeds.fields import JetSource, ScalarField
from src.seeds.grid import Grid2

Rect = Tuple[int, int, int, int]  # inclusive (i0, i1, j0, j1)

_E = np.array([[0.0, 1.0], [-1.0, 0.0]])


@dataclass(frozen=True)
class Gauge:
    base_index: Tuple[int, int]
    base_point: Tuple[float, float]
    constants: Dict[str, float] = field(default_factory=lambda: {"x1": 0.0, "x2": 0.0, "u": 0.0})

    def as_dict(self) -> Dict[str, object]:
        return {
            "base_index": list(self.base_index),
            "base_point": {"H": self.base_point[0], "r": self.base_point[1]},
            "constants": dict(self.constants),
        }


@dataclass(frozen=True)
class Chart:
    grid: Grid2
    jd: JoyceData
    xi1: ScalarField
    xi2: ScalarField
    x1: ScalarField
    x2: ScalarField
    u: ScalarField
    A: np.ndarray        # (nH, nr, 2, 2)
    B: np.ndarray
    detA: np.ndarray
    detB: np.ndarray
    J: np.ndarray
    gauge: Gauge
    discrepancy: Dict[str, float]
    closedness: Dict[str, float]
    potential: str = ""

    @property
    def analytic(self) -> bool:
        return self.xi1.jet_source == JetSource.ANALYTIC and self.xi2.jet_source == JetSource.ANALYTIC


# =============================================================================
# Nondegeneracy
# =============================================================================

@dataclass(frozen=True)
class NondegeneracyMask:
    det: np.ndarray
    mask: np.ndarray
    anchor: Tuple[int, int]
    rect: Optional[Rect]

    @property
    def covers_grid(self) -> bool:
        return bool(np.all(self.mask))

    @property
    def empty(self) -> bool:
        return self.rect is None


def largest_rectangle(mask: np.ndarray, anchor: Tuple[int, int]) -> Optional[Rect]:
    """Largest axis-aligned all-True index rectangle containing ``anchor``."""
    i0, j0 = anchor
    n0, n1 = mask.shape
    if not mask[i0, j0]:
        return None
    top = np.full(n1, -1)
    bot = np.full(n1, -1)
    for j in range(n1):
        if not mask[i0, j]:
            continue
        lo = i0
        while lo > 0 and mask[lo - 1, j]:
            lo -= 1
        hi = i0
        while hi < n0 - 1 and mask[hi + 1, j]:
            hi += 1
        top[j], bot[j] = lo, hi

    best: Optional[Rect] = None
    best_area = 0
    jl = j0
    while jl >= 0 and top[jl] >= 0:
        jr = j0
        t, b = max(top[jl:j0 + 1]), min(bot[jl:j0 + 1])
        while jr < n1 and top[jr] >= 0:
            t = max(t, top[jr])
            b = min(b, bot[jr])
            area = (b - t + 1) * (jr - jl + 1)
            if area > best_area:
                best_area = area
                best = (int(t), int(b), int(jl), int(jr))
            jr += 1
        jl -= 1
    return best


def nondegeneracy_mask(xi1: ScalarField, xi2: ScalarField, anchor: Optional[Tuple[float, float]] = None) -> NondegeneracyMask:
    """Nodes with det d(xi1, xi2)/d(H, r) > 0 and the largest rectangle around ``anchor``."""
    if xi1.grid != xi2.grid:
        raise GridMismatchError("Seeds must share a grid")
    grid = xi1.grid
    if anchor is None:
        idx = (grid.nH // 2, grid.nr // 2)
    else:
        idx = grid.nearest(*anchor)
    j1, j2 = xi1.require_jet(), xi2.require_jet()
    det = j1.dH * j2.dr - j1.dr * j2.dH
    mask = det > 0.0
    rect = largest_rectangle(mask, idx)
    if rect is not None:
        i0, i1, c0, c1 = rect
        if i1 - i0 < 2 or c1 - c0 < 2:
            rect = None
    return NondegeneracyMask(det=det, mask=mask, anchor=idx, rect=rect)


# =============================================================================
# Assembly
# =============================================================================

def jacobians(eps1: OneForm, eps2: OneForm, xi1: ScalarField, xi2: ScalarField):
    """(A, B, detA, detB): rows of A are the components of eps1 and eps2, rows of B the seed gradients."""
    A = np.stack([np.stack([eps1.a, eps1.b], axis=-1), np.stack([eps2.a, eps2.b], axis=-1)], axis=-2)
    j1, j2 = xi1.require_jet(), xi2.require_jet()
    B = np.stack([np.stack([j1.dH, j1.dr], axis=-1), np.stack([j2.dH, j2.dr], axis=-1)], axis=-2)
    detA = A[..., 0, 0] * A[..., 1, 1] - A[..., 0, 1] * A[..., 1, 0]
    detB = B[..., 0, 0] * B[..., 1, 1] - B[..., 0, 1] * B[..., 1, 0]
    return A, B, detA, detB


def assemble_chart(
    xi1: ScalarField,
    xi2: ScalarField,
    jd: JoyceData,
    base: Optional[Tuple[int, int]] = None,
    tol: float = 1e-6,
    potential: str = "",
) -> Chart:
    """
    Integrate dx1 = eps1, dx2 = eps2, du = eps from ``base`` (default: first node).

    Where det d(xi1, xi2)/d(H, r) fails to be positive somewhere, the seeds
    are restricted to the largest positive rectangle around ``base`` (or the
    grid centre) and ``base`` is re-indexed into it.
    """
    grid = xi1.grid
    grid.check_inside(jd)
    if base is not None and not (0 <= base[0] < grid.nH and 0 <= base[1] < grid.nr):
        raise DomainError(f"Base node {base} is outside the grid")
    nd = nondegeneracy_mask(xi1, xi2, None if base is None else grid.node(*base))
    if nd.empty:
        bad = np.argwhere(~nd.mask)
        raise NondegeneracyError(
            f"det d(xi1, xi2)/d(H, r) <= 0 at {len(bad)} of {nd.mask.size} nodes and no positive rectangle around node {nd.anchor}",
            nodes=[tuple(int(v) for v in n) for n in bad],
        )
    if not nd.covers_grid:
        i0, i1, j0, j1 = nd.rect
        logger.warning(
            f"[construct] det d(xi1, xi2)/d(H, r) <= 0 at {int((~nd.mask).sum())} nodes; "
            f"restricting to H in [{grid.H[i0]:.6g}, {grid.H[i1]:.6g}], r in [{grid.r[j0]:.6g}, {grid.r[j1]:.6g}]"
        )
        xi1, xi2 = restrict_seeds(xi1, xi2, nd.rect)
        grid = xi1.grid
        if base is not None:
            base = (base[0] - i0, base[1] - j0)
    base = base or (0, 0)

    eps1, eps2, eps = build_forms(xi1, xi2, jd)
    source = JetSource.ANALYTIC if xi1.jet_source == xi2.jet_source == JetSource.ANALYTIC else JetSource.FINITE_DIFFERENCE
    px1 = integrate_potential(eps1, base, tol, name="x1", jet_source=source)
    px2 = integrate_potential(eps2, base, tol, name="x2", jet_source=source)
    pu = integrate_potential(eps, base, tol, name="u", jet_source=source)

    A, B, detA, detB = jacobians(eps1, eps2, xi1, xi2)

    chart = Chart(
        grid=grid,
        jd=jd,
        xi1=xi1,
        xi2=xi2,
        x1=px1.field,
        x2=px2.field,
        u=pu.field,
        A=A,
        B=B,
        detA=detA,
        detB=detB,
        J=detB / detA,
        gauge=Gauge(base_index=tuple(base), base_point=grid.node(*base)),
        discrepancy={"x1": px1.discrepancy, "x2": px2.discrepancy, "u": pu.discrepancy},
        closedness={"eps1": px1.closedness.relative, "eps2": px2.closedness.relative, "eps": pu.closedness.relative},
        potential=potential,
    )
    logger.info(
        f"[construct] Assembled chart {grid.nH}x{grid.nr} for ({xi1.name}, {xi2.name}); "
        f"max path discrepancy {max(chart.discrepancy.values()):.3e}"
    )
    return chart


def restrict_seeds(xi1: ScalarField, xi2: ScalarField, rect: Rect) -> Tuple[ScalarField, ScalarField]:
    i0, i1, j0, j1 = rect
    return xi1.restrict(i0, i1, j0, j1), xi2.restrict(i0, i1, j0, j1)


# =============================================================================
# Identities
# =============================================================================

class ChartIdentityReport(BaseModel):
    jp2_defect: float           # max |J p^2 - 1|
    det_defect: float           # max |detA - p^2 detB| / max |p^2 detB|
    isothermal_defect: float    # max |B - sqrt(J) E A E^T| / max |B|
    detB_min: float
    integration_defect: float   # finite differences of x against A, relative
    discrepancy: Dict[str, float]
    closedness: Dict[str, float]
    tolerance: float
    passed: bool


def chart_identities(chart: Chart, tol: Optional[float] = None) -> ChartIdentityReport:
    tol = settings().tol_identity if tol is None else tol
    _, RR = chart.grid.mesh()
    p = np.asarray(chart.jd.p(RR), dtype=float)
    p2detB = p**2 * chart.detB
    jp2 = float(np.max(np.abs(chart.J * p**2 - 1.0)))
    det_defect = float(np.max(np.abs(chart.detA - p2detB)) / max(float(np.max(np.abs(p2detB))), 1e-300))
    rotated = np.einsum("ik,...kl,jl->...ij", _E, chart.A, _E)
    iso = chart.B - np.sqrt(chart.J)[..., None, None] * rotated
    iso_defect = float(np.max(np.abs(iso)) / max(float(np.max(np.abs(chart.B))), 1e-300))

    fd = []
    for row, field in enumerate((chart.x1, chart.x2)):
        jet = field.with_fd_jet().jet
        fd.append(np.abs(jet.dH - chart.A[..., row, 0]))
        fd.append(np.abs(jet.dr - chart.A[..., row, 1]))
    integration = float(max(np.max(f) for f in fd) / max(float(np.max(np.abs(chart.A))), 1e-300))

    passed = jp2 <= tol and det_defect <= tol and iso_defect <= tol and float(np.min(chart.detB)) > 0.0
    return ChartIdentityReport(
        jp2_defect=jp2,
        det_defect=det_defect,
        isothermal_defect=iso_defect,
        detB_min=float(np.min(chart.detB)),
        integration_defect=integration,
        discrepancy=dict(chart.discrepancy),
        closedness=dict(chart.closedness),
        tolerance=tol,
        passed=passed,
    )
