"""
Deterministic text output: JSON with 17-significant-digit numbers and
atomic temp-and-rename writes.
"""
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Dict

import numpy as np
from loguru import logger
from tenacity import retry, retry_if_exception_type, stop_after_attempt, wait_fixed

from src.__version__ import __version__


def format_number(value: float) -> str:
    """17 significant digits, so the text parses back to the same double."""
    v = float(value)
    if not math.isfinite(v):
        return "null"
    text = format(v, ".17g")
    return text if any(c in text for c in ".en") else text + ".0"


def _emit(obj: Any, indent: int, level: int) -> str:
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{json.dumps(str(k))}: {_emit(v, indent, level + 1)}" for k, v in obj.items()]
        if level >= 2:
            return "{" + ", ".join(items) + "}"
        pad = " " * (indent * (level + 1))
        return "{\n" + ",\n".join(pad + item for item in items) + "\n" + " " * (indent * level) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if level >= 1 and any(isinstance(v, dict) for v in seq):
            pad = " " * (indent * (level + 1))
            return "[\n" + ",\n".join(pad + _emit(v, indent, level + 1) for v in seq) + "\n" + " " * (indent * level) + "]"
        return "[" + ", ".join(_emit(v, indent, level + 1) for v in seq) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_number(obj)
    return json.dumps(str(obj))


def to_json_text(obj: Any, indent: int = 2) -> str:
    """Canonical JSON: insertion-ordered keys, one record per line in record lists."""
    return _emit(obj, indent, 0) + "\n"


@retry(
    stop=stop_after_attempt(5),
    wait=wait_fixed(0.05),
    retry=retry_if_exception_type(OSError),
    reraise=True,
)
def atomic_write(path: str, text: str) -> Path:
    """Write to a temp file next to ``path`` and rename over it."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=str(target.parent))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, target)
    except OSError:
        logger.warning(f"[export] Write of {target} failed, retrying")
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return target


def header(schema: str, config_hash: str) -> Dict[str, Any]:
    return {"schema": schema, "config_hash": config_hash, "version": __version__}


def write_json(path: str, payload: Dict[str, Any]) -> Path:
    out = atomic_write(path, to_json_text(payload))
    logger.info(f"[export] Wrote {out}")
    return out


def read_json(path: str) -> Dict[str, Any]:
    with open(path, encoding="utf-8") as f:
        return json.load(f)
