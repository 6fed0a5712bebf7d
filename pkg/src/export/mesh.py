"""
Surfaces as ASCII OBJ: one ``v`` record per grid node in grid order and one
quad ``f`` record per cell, plus a JSON sidecar with the surface checks.
"""
from pathlib import Path
from typing import Tuple

import numpy as np
from loguru import logger

from src.affine.surface import Surface
from src.export.writer import atomic_write, format_number, header, write_json

SURFACE_SCHEMA = "surface/1"


def obj_text(surface: Surface, config_hash: str) -> str:
    lines = [
        f"# schema={SURFACE_SCHEMA} config_hash={config_hash}",
        f"# {surface.name} grid {surface.grid.nH}x{surface.grid.nr}",
    ]
    lines += ["v " + " ".join(format_number(c) for c in vertex) for vertex in surface.vertices]
    # OBJ indices are 1-based
    lines += ["f " + " ".join(str(int(k) + 1) for k in face) for face in surface.faces]
    return "\n".join(lines) + "\n"


def export_surface(surface: Surface, path: str, config_hash: str) -> Tuple[Path, Path]:
    """Writes ``path`` and ``<path>.json``; degenerate surfaces are exported with a warning."""
    obj = atomic_write(path, obj_text(surface, config_hash))
    warnings = []
    if surface.degenerate:
        warnings.append("zero-area surface: the differential is rank deficient")
        logger.warning(f"[export] {surface.name}: exporting a zero-area surface to {obj}")
    sidecar = write_json(str(obj) + ".json", {
        **header(SURFACE_SCHEMA, config_hash),
        "name": surface.name,
        "vertices": int(surface.vertices.shape[0]),
        "faces": int(surface.faces.shape[0]),
        "base": list(surface.base),
        "area": surface.area,
        "discrepancy": surface.discrepancy,
        "consistency": surface.consistency,
        "degenerate": surface.degenerate,
        "warnings": warnings,
    })
    logger.info(f"[export] Wrote {obj} ({surface.vertices.shape[0]} vertices, {surface.faces.shape[0]} quads)")
    return obj, sidecar


def read_obj(path: str) -> Tuple[np.ndarray, np.ndarray]:
    """Vertices (n, 3) and 0-based faces (m, k)."""
    vertices, faces = [], []
    with open(path, encoding="utf-8") as f:
        for line in f:
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if parts[0] == "v":
                vertices.append([float(v) for v in parts[1:4]])
            elif parts[0] == "f":
                faces.append([int(v.split("/")[0]) - 1 for v in parts[1:]])
    return np.asarray(vertices, dtype=float), np.asarray(faces, dtype=int)
