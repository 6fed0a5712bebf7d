"""
Chart files (schema chart/1).

Nodes are listed row-major with r fastest. Seeds are recorded by their spec
text so a loaded chart gets its closed forms (and hence the evaluator) back
whenever the stored values agree with them.
"""
import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
from loguru import logger

from src.construct.chart import Chart, Gauge, jacobians
from src.construct.forms import build_forms
from src.core.errors import ConfigError, HashMismatchError, JoyceError
from src.export.writer import header, read_json, write_json
from src.potential import derive_joyce_data, parse_potential
from src.potential.models import JoyceData
from src.seeds import make_seed, parse_seed
from src.seeds.fields import ScalarField
from src.seeds.grid import Grid2

CHART_SCHEMA = "chart/1"
NODE_ORDER = "row-major-r-fastest"
NODE_KEYS = ("H", "r", "x1", "x2", "u", "xi1", "xi2", "J")


def potential_fingerprint(potential: str, joyce_mode: str) -> str:
    return hashlib.sha256(f"{potential}|{joyce_mode}".encode()).hexdigest()[:16]


def chart_payload(chart: Chart, config_hash: str, joyce_mode: str = "closed-form") -> Dict[str, Any]:
    g = chart.grid
    HH, RR = g.mesh()
    columns = {
        "H": HH, "r": RR, "x1": chart.x1.values, "x2": chart.x2.values, "u": chart.u.values,
        "xi1": chart.xi1.values, "xi2": chart.xi2.values, "J": chart.J,
    }
    flat = {k: np.ravel(v) for k, v in columns.items()}
    nodes = [{k: float(flat[k][n]) for k in NODE_KEYS} for n in range(HH.size)]
    return {
        **header(CHART_SCHEMA, config_hash),
        "potential": chart.potential,
        "joyce_mode": joyce_mode,
        "potential_fingerprint": potential_fingerprint(chart.potential, joyce_mode),
        "p_kind": chart.jd.p_kind.value,
        "seeds": {"xi1": chart.xi1.name, "xi2": chart.xi2.name},
        "domain": {"H": list(g.H_range), "r": list(g.r_range)},
        "grid": [g.nH, g.nr],
        "order": NODE_ORDER,
        "gauge": chart.gauge.as_dict(),
        "discrepancy": dict(chart.discrepancy),
        "closedness": dict(chart.closedness),
        "nodes": nodes,
    }


def export_chart(chart: Chart, path: str, config_hash: str, joyce_mode: str = "closed-form") -> Path:
    return write_json(path, chart_payload(chart, config_hash, joyce_mode))


@dataclass(frozen=True)
class LoadedChart:
    chart: Chart
    config_hash: str
    potential: str
    joyce_mode: str
    fingerprint: str


def _seed(text: str, values: np.ndarray, jd: JoyceData, grid: Grid2) -> ScalarField:
    """The named seed when it reproduces the stored values, else the values with FD jets."""
    try:
        seed = make_seed(parse_seed(text), jd, grid)
    except JoyceError as e:
        logger.debug(f"[export] Seed '{text}' not rebuilt ({e}); using stored values")
        return ScalarField.from_values(grid, values, name=text)
    scale = max(1.0, float(np.max(np.abs(values))))
    if float(np.max(np.abs(seed.values - values))) <= 1e-12 * scale:
        return seed
    logger.warning(f"[export] Stored values of seed '{text}' differ from its closed form; using stored values")
    return ScalarField.from_values(grid, values, name=text)


def load_chart(
    path: str,
    potential: Optional[str] = None,
    joyce_mode: Optional[str] = None,
    force: bool = False,
) -> LoadedChart:
    """
    Read a chart file. When ``potential`` is given it must match the file's
    potential fingerprint unless ``force``; the file's own potential is used
    otherwise.
    """
    data = read_json(path)
    if data.get("schema") != CHART_SCHEMA:
        raise ConfigError(f"{path} is not a {CHART_SCHEMA} file (schema {data.get('schema')!r})")
    if data.get("order") != NODE_ORDER:
        raise ConfigError(f"{path}: unsupported node order {data.get('order')!r}")

    stored_potential = data["potential"]
    stored_mode = data.get("joyce_mode", "closed-form")
    fingerprint = data.get("potential_fingerprint", potential_fingerprint(stored_potential, stored_mode))
    use_potential, use_mode = stored_potential, stored_mode
    if potential is not None:
        wanted = potential_fingerprint(potential, joyce_mode or stored_mode)
        if wanted != fingerprint:
            message = f"{path} was built for '{stored_potential}' ({stored_mode}), not '{potential}'"
            if not force:
                raise HashMismatchError(message + "; pass --force to override")
            logger.warning(f"[export] {message}; continuing because of --force")
            use_potential, use_mode = potential, joyce_mode or stored_mode

    nH, nr = (int(n) for n in data["grid"])
    grid = Grid2(tuple(data["domain"]["H"]), tuple(data["domain"]["r"]), nH, nr)
    nodes = data["nodes"]
    if len(nodes) != nH * nr:
        raise ConfigError(f"{path}: expected {nH * nr} nodes, found {len(nodes)}")
    columns = {k: np.array([n[k] for n in nodes], dtype=float).reshape(nH, nr) for k in NODE_KEYS}

    jd = derive_joyce_data(parse_potential(use_potential), use_mode)
    xi1 = _seed(data["seeds"]["xi1"], columns["xi1"], jd, grid)
    xi2 = _seed(data["seeds"]["xi2"], columns["xi2"], jd, grid)
    eps1, eps2, _ = build_forms(xi1, xi2, jd)
    A, B, detA, detB = jacobians(eps1, eps2, xi1, xi2)

    g = data["gauge"]
    gauge = Gauge(
        base_index=tuple(int(v) for v in g["base_index"]),
        base_point=(float(g["base_point"]["H"]), float(g["base_point"]["r"])),
        constants={k: float(v) for k, v in g["constants"].items()},
    )
    chart = Chart(
        grid=grid,
        jd=jd,
        xi1=xi1,
        xi2=xi2,
        x1=ScalarField.from_values(grid, columns["x1"], "x1"),
        x2=ScalarField.from_values(grid, columns["x2"], "x2"),
        u=ScalarField.from_values(grid, columns["u"], "u"),
        A=A,
        B=B,
        detA=detA,
        detB=detB,
        J=detB / detA,
        gauge=gauge,
        discrepancy={k: float(v) for k, v in data.get("discrepancy", {}).items()},
        closedness={k: float(v) for k, v in data.get("closedness", {}).items()},
        potential=use_potential,
    )
    logger.info(f"[export] Loaded chart {nH}x{nr} from {path} (seeds {xi1.name}, {xi2.name})")
    return LoadedChart(
        chart=chart,
        config_hash=str(data.get("config_hash", "")),
        potential=use_potential,
        joyce_mode=use_mode,
        fingerprint=fingerprint,
    )
