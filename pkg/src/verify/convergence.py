"""
Grid-convergence studies: run a residual producer on successively refined
grids and fit the order from log(L2) against log(h).
"""
from typing import Callable, Optional, Sequence

import numpy as np
from loguru import logger

from src.core.config import settings
from src.core.errors import ConfigError
from src.verify.models import ResidualReport

ZERO_FLOOR = 1e-12


def fitted_order(h: Sequence[float], norms: Sequence[float]) -> float:
    """Least-squares slope of log(norm) against log(h)."""
    logs = np.log(np.maximum(np.asarray(norms, dtype=float), 1e-300))
    return float(np.polyfit(np.log(np.asarray(h, dtype=float)), logs, 1)[0])


def convergence_study(
    producer: Callable[[int], ResidualReport],
    levels: Sequence[int],
    tol: Optional[float] = None,
    threshold: Optional[float] = None,
    floor: float = ZERO_FLOOR,
) -> ResidualReport:
    """
    ``producer(level)`` returns a single-level report. The study passes when
    the fitted order reaches ``threshold`` and the finest L-infinity norm is
    within ``tol``. When every level is at or below ``floor``, or every level
    is at or below the round-off estimate its report carries in ``noise``,
    the residual holds no discretization error to fit: the fit is skipped
    and the study passes.
    """
    if len(levels) < 3:
        raise ConfigError(f"A convergence study needs at least 3 levels, got {len(levels)}")
    tol = settings().tol_residual if tol is None else tol
    threshold = settings().order_threshold if threshold is None else threshold

    reports = [producer(level) for level in levels]
    h = [r.h[0] for r in reports]
    linf = [r.linf[0] for r in reports]
    l2 = [r.l2[0] for r in reports]
    noise = [r.noise[0] if r.noise else 0.0 for r in reports]
    notes = []
    if max(linf) <= floor:
        order = None
        passed = True
        notes.append(f"all levels at or below {floor:.1e}; order fit skipped")
    elif all(v <= n for v, n in zip(linf, noise)):
        order = None
        passed = True
        notes.append("all levels at the round-off floor; order fit skipped")
        logger.warning(f"[verify] {reports[0].name}: residuals {['%.2e' % v for v in linf]} are round-off, not truncation error")
    else:
        order = fitted_order(h, l2)
        # the finest level carries its own checks (tolerance, flux ratio band)
        passed = order >= threshold and linf[-1] <= tol and reports[-1].passed
        notes += reports[-1].notes
    name = reports[0].name
    logger.info(
        f"[verify] Convergence of {name}: Linf {['%.2e' % v for v in linf]}, "
        f"order {'skipped' if order is None else f'{order:.2f}'} -> {'PASS' if passed else 'FAIL'}"
    )
    return ResidualReport(
        name=name,
        grids=[g for r in reports for g in r.grids],
        h=h,
        linf=linf,
        l2=l2,
        order=order,
        tolerance=tol,
        threshold=threshold,
        passed=passed,
        ratio=reports[-1].ratio,
        noise=noise,
        notes=notes,
        field=reports[-1].field,
    )
