"""
Reports, seed fields and tabular data: residual-report and seed JSON,
convergence CSV, and regular-grid solution CSV (x1, x2, u).
"""
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

import numpy as np
import pandas as pd
from loguru import logger
from pydantic import BaseModel

from src.core.errors import ConfigError, GridMismatchError
from src.export.writer import atomic_write, header, read_json, write_json
from src.seeds.fields import ScalarField
from src.seeds.grid import Grid2
from src.verify.models import ResidualReport, SolutionProvenance, XGrid, XGridSolution

REPORT_SCHEMA = "report/1"
FIELD_SCHEMA = "field/1"
CONVERGENCE_SCHEMA = "convergence/1"
SOLUTION_SCHEMA = "solution/1"


def _plain(value: Any) -> Any:
    if isinstance(value, BaseModel):
        return value.model_dump()
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def export_report(path: str, name: str, body: Dict[str, Any], config_hash: str, passed: Optional[bool] = None) -> Path:
    payload = {**header(REPORT_SCHEMA, config_hash), "name": name}
    if passed is not None:
        payload["passed"] = bool(passed)
    payload["checks"] = _plain(body)
    return write_json(path, payload)


# =============================================================================
# Seed fields
# =============================================================================

def export_field(field: ScalarField, path: str, config_hash: str, extra: Optional[Dict[str, Any]] = None) -> Path:
    g = field.grid
    payload = {
        **header(FIELD_SCHEMA, config_hash),
        "name": field.name,
        "jet_source": field.jet_source.value,
        "domain": {"H": list(g.H_range), "r": list(g.r_range)},
        "grid": [g.nH, g.nr],
        "order": "row-major-r-fastest",
        **(extra or {}),
        "values": [float(v) for v in np.ravel(field.values)],
    }
    return write_json(path, payload)


def load_field(path: str) -> ScalarField:
    data = read_json(path)
    if data.get("schema") != FIELD_SCHEMA:
        raise ConfigError(f"{path} is not a {FIELD_SCHEMA} file")
    nH, nr = (int(n) for n in data["grid"])
    grid = Grid2(tuple(data["domain"]["H"]), tuple(data["domain"]["r"]), nH, nr)
    values = np.asarray(data["values"], dtype=float)
    if values.size != nH * nr:
        raise GridMismatchError(f"{path}: expected {nH * nr} values, found {values.size}")
    return ScalarField.from_values(grid, values.reshape(nH, nr), name=data.get("name", Path(path).stem))


# =============================================================================
# Convergence tables
# =============================================================================

def convergence_frame(reports: Iterable[ResidualReport]) -> pd.DataFrame:
    rows = []
    for report in reports:
        for level, (shape, h, linf, l2) in enumerate(zip(report.grids, report.h, report.linf, report.l2)):
            rows.append({
                "residual": report.name,
                "level": level,
                "n1": shape[0],
                "n2": shape[1],
                "h": h,
                "linf": linf,
                "l2": l2,
                "order": report.order,
                "passed": report.passed,
            })
    return pd.DataFrame(rows, columns=["residual", "level", "n1", "n2", "h", "linf", "l2", "order", "passed"])


def export_convergence(reports: Iterable[ResidualReport], path: str, config_hash: str) -> Path:
    frame = convergence_frame(reports)
    text = f"# schema={CONVERGENCE_SCHEMA} config_hash={config_hash}\n" + frame.to_csv(index=False, float_format="%.17g", lineterminator="\n")
    out = atomic_write(path, text)
    logger.info(f"[export] Wrote convergence table {out} ({len(frame)} rows)")
    return out


def read_convergence(path: str) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")


# =============================================================================
# Solutions on x-grids
# =============================================================================

def export_solution_csv(sol: XGridSolution, path: str, config_hash: str) -> Path:
    X1, X2 = sol.grid.mesh()
    frame = pd.DataFrame({"x1": X1.ravel(), "x2": X2.ravel(), "u": sol.u.ravel()})
    text = f"# schema={SOLUTION_SCHEMA} config_hash={config_hash}\n" + frame.to_csv(index=False, float_format="%.17g", lineterminator="\n")
    out = atomic_write(path, text)
    logger.info(f"[export] Wrote {sol.grid.n1}x{sol.grid.n2} solution {out}")
    return out


def read_solution_csv(path: str, name: Optional[str] = None) -> XGridSolution:
    """A regular-grid CSV with columns x1, x2, u, in any row order."""
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"Solution file {path} not found")
    frame = pd.read_csv(p, comment="#")
    if not {"x1", "x2", "u"} <= set(frame.columns):
        raise ConfigError(f"{path} needs columns 'x1,x2,u'")
    if frame[["x1", "x2", "u"]].isna().any().any():
        raise ConfigError(f"{path} has missing values")
    x1 = np.unique(frame["x1"].to_numpy(dtype=float))
    x2 = np.unique(frame["x2"].to_numpy(dtype=float))
    if len(frame) != x1.size * x2.size:
        raise GridMismatchError(f"{path} is not a full regular grid: {len(frame)} rows for {x1.size}x{x2.size} nodes")
    if min(x1.size, x2.size) < 3:
        raise GridMismatchError(f"{path}: a solution grid needs at least 3x3 nodes, got {x1.size}x{x2.size}")
    grid = XGrid((float(x1[0]), float(x1[-1])), (float(x2[0]), float(x2[-1])), x1.size, x2.size)
    for axis, values, spacing in ((1, x1, grid.h1), (2, x2, grid.h2)):
        if not np.allclose(np.diff(values), spacing, rtol=1e-9, atol=0.0):
            raise GridMismatchError(f"{path}: x{axis} is not uniformly spaced")
    frame = frame.sort_values(["x1", "x2"])
    u = frame["u"].to_numpy(dtype=float).reshape(grid.shape)
    logger.info(f"[export] Read {grid.n1}x{grid.n2} solution from {path}")
    return XGridSolution(grid=grid, u=u, provenance=SolutionProvenance.EXTERNAL, name=name or p.stem)
