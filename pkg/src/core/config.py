"""
Centralized configuration for the Joyce construction toolkit.

Two layers:
- Settings: tolerance and path defaults from the environment (.env aware).
- RunConfig: one reproducible run (potential, grid, seeds, tolerances ...),
  parsed from a flat key=value file or its JSON equivalent.
"""
import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple

from dotenv import dotenv_values, load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from src.core.errors import ConfigError, JoyceError

load_dotenv()


@dataclass
class Settings:
    """Numerical defaults."""
    tol_closedness: float = 1e-6   # relative to the form's magnitude
    tol_residual: float = 1e-4
    tol_newton: float = 1e-12
    tol_divergence: float = 5e-3   # relative to |v| / domain size
    tol_harmonic: float = 1e-8
    tol_identity: float = 1e-10    # algebraic identities on exact jets
    tol_identity_h2: float = 1.0   # times h^2 where a finite-difference jet enters
    ordinary_delta: float = 1e-6
    order_threshold: float = 1.9
    newton_maxiter: int = 30
    out_dir: str = "out"

    def tolerances(self) -> Dict[str, float]:
        return {
            "closedness": self.tol_closedness,
            "residual": self.tol_residual,
            "newton": self.tol_newton,
            "divergence": self.tol_divergence,
            "harmonic": self.tol_harmonic,
            "identity": self.tol_identity,
            "identity_h2": self.tol_identity_h2,
        }


def get_settings() -> Settings:
    """Get settings from environment with defaults."""
    return Settings(
        tol_closedness=float(os.getenv("JOYCE_TOL_CLOSEDNESS", "1e-6")),
        tol_residual=float(os.getenv("JOYCE_TOL_RESIDUAL", "1e-4")),
        tol_newton=float(os.getenv("JOYCE_TOL_NEWTON", "1e-12")),
        tol_divergence=float(os.getenv("JOYCE_TOL_DIVERGENCE", "5e-3")),
        tol_harmonic=float(os.getenv("JOYCE_TOL_HARMONIC", "1e-8")),
        tol_identity=float(os.getenv("JOYCE_TOL_IDENTITY", "1e-10")),
        tol_identity_h2=float(os.getenv("JOYCE_TOL_IDENTITY_H2", "1.0")),
        ordinary_delta=float(os.getenv("JOYCE_ORDINARY_DELTA", "1e-6")),
        order_threshold=float(os.getenv("JOYCE_ORDER_THRESHOLD", "1.9")),
        newton_maxiter=int(os.getenv("JOYCE_NEWTON_MAXITER", "30")),
        out_dir=os.getenv("JOYCE_OUT_DIR", "out"),
    )


_settings: Optional[Settings] = None


def settings() -> Settings:
    """Get cached settings."""
    global _settings
    if _settings is None:
        _settings = get_settings()
    return _settings


# =============================================================================
# RunConfig
# =============================================================================

TOLERANCE_NAMES = ("closedness", "residual", "newton", "divergence", "harmonic", "identity", "identity_h2")
FORMATS = ("json", "csv", "obj", "svg")
CONFIG_SCHEMA = "config/1"


def parse_domain(text: str) -> Tuple[float, float, float, float]:
    """'H0:H1,r0:r1' -> (H0, H1, r0, r1)."""
    try:
        h_part, r_part = text.split(",")
        h0, h1 = (float(v) for v in h_part.split(":"))
        r0, r1 = (float(v) for v in r_part.split(":"))
    except ValueError as e:
        raise ConfigError(f"Invalid domain '{text}', expected H0:H1,r0:r1") from e
    return (h0, h1, r0, r1)


def parse_grid(text: str) -> Tuple[int, int]:
    """'NxM' -> (N, M)."""
    try:
        n, m = (int(v) for v in text.lower().split("x"))
    except ValueError as e:
        raise ConfigError(f"Invalid grid '{text}', expected NxM") from e
    return (n, m)


class RunConfig(BaseModel):
    """Everything needed to reproduce one run."""
    potential: str = "logdet"
    joyce_mode: Literal["closed-form", "quadrature"] = "closed-form"
    domain: Tuple[float, float, float, float] = (0.0, 1.0, 1.0, 2.0)
    grid: Tuple[int, int] = (65, 65)
    seed1: str = "H"
    seed2: str = "logr"
    base: Optional[Tuple[float, float]] = None
    harmonic1: str = "l1"
    harmonic2: str = "l1*l2"
    tolerances: Dict[str, float] = Field(default_factory=lambda: settings().tolerances())
    refine: int = 3
    xgrid: Optional[int] = None
    out: str = Field(default_factory=lambda: settings().out_dir)
    formats: List[str] = Field(default_factory=lambda: ["json"])

    @field_validator("domain", mode="before")
    @classmethod
    def _domain(cls, v):
        return parse_domain(v) if isinstance(v, str) else v

    @field_validator("grid", mode="before")
    @classmethod
    def _grid(cls, v):
        return parse_grid(v) if isinstance(v, str) else v

    @field_validator("base", mode="before")
    @classmethod
    def _base(cls, v):
        if isinstance(v, str):
            if not v.strip():
                return None
            h, r = v.split(":")
            return (float(h), float(r))
        return v

    @field_validator("xgrid", mode="before")
    @classmethod
    def _xgrid(cls, v):
        if isinstance(v, str):
            return int(v) if v.strip() else None
        return v

    @field_validator("formats", mode="before")
    @classmethod
    def _formats(cls, v):
        if isinstance(v, str):
            v = [f.strip() for f in v.split(",") if f.strip()]
        unknown = [f for f in v if f not in FORMATS]
        if unknown:
            raise ValueError(f"Unknown formats {unknown}; choose from {FORMATS}")
        return sorted(set(v), key=FORMATS.index)

    @field_validator("tolerances")
    @classmethod
    def _tolerances(cls, v: Dict[str, float]):
        merged = {**settings().tolerances(), **v}
        unknown = [k for k in merged if k not in TOLERANCE_NAMES]
        if unknown:
            raise ValueError(f"Unknown tolerances {unknown}")
        bad = [k for k, val in merged.items() if not val > 0]
        if bad:
            raise ValueError(f"Tolerances must be positive: {bad}")
        return dict(sorted(merged.items()))

    @model_validator(mode="after")
    def _check_geometry(self):
        h0, h1, r0, r1 = self.domain
        if not (h1 > h0 and r1 > r0):
            raise ValueError(f"Empty domain {self.domain}")
        if min(self.grid) < 3:
            raise ValueError(f"Grid {self.grid} needs at least 3x3 nodes")
        if self.refine < 1:
            raise ValueError("refine must be >= 1")
        # Grid must sit strictly inside I for the chosen potential
        from src.potential import derive_joyce_data, parse_potential

        jd = derive_joyce_data(parse_potential(self.potential), self.joyce_mode)
        lo, hi = jd.interval
        if not (r0 > lo and r1 < hi):
            raise ValueError(f"r-range [{r0}, {r1}] not strictly inside I = ({lo}, {hi}) for '{self.potential}'")
        return self

    # -------------------------------------------------------------------------

    def to_flat(self) -> Dict[str, str]:
        h0, h1, r0, r1 = self.domain
        flat = {
            "base": "" if self.base is None else f"{self.base[0]!r}:{self.base[1]!r}",
            "domain": f"{h0!r}:{h1!r},{r0!r}:{r1!r}",
            "formats": ",".join(self.formats),
            "grid": f"{self.grid[0]}x{self.grid[1]}",
            "harmonic1": self.harmonic1,
            "harmonic2": self.harmonic2,
            "joyce_mode": self.joyce_mode,
            "out": self.out,
            "potential": self.potential,
            "refine": str(self.refine),
            "seed1": self.seed1,
            "seed2": self.seed2,
            "xgrid": "" if self.xgrid is None else str(self.xgrid),
        }
        for name, value in self.tolerances.items():
            flat[f"tol.{name}"] = repr(float(value))
        return dict(sorted(flat.items()))

    def serialize(self) -> str:
        """Canonical key=value text."""
        return "".join(f"{k}={v}\n" for k, v in self.to_flat().items())

    def to_file_text(self) -> str:
        """Canonical text under a comment header naming the schema and the hash."""
        return f"# schema={CONFIG_SCHEMA} config_hash={self.config_hash()}\n" + self.serialize()

    @classmethod
    def from_flat(cls, flat: Dict[str, Optional[str]]) -> "RunConfig":
        fields: Dict[str, object] = {}
        tolerances: Dict[str, float] = {}
        for key, value in flat.items():
            value = "" if value is None else str(value)
            if key.startswith("tol."):
                try:
                    tolerances[key[4:]] = float(value)
                except ValueError as e:
                    raise ConfigError(f"Tolerance '{key}' is not a number: '{value}'") from e
            elif key in cls.model_fields:
                fields[key] = value
            else:
                raise ConfigError(f"Unknown config key '{key}'")
        if tolerances:
            fields["tolerances"] = tolerances
        return cls._build(fields)

    @classmethod
    def _build(cls, fields: Dict[str, object]) -> "RunConfig":
        try:
            return cls(**fields)
        except ValidationError as e:
            raise ConfigError(f"Invalid configuration: {e.errors()[0].get('msg', e)}") from e
        except JoyceError as e:
            raise ConfigError(f"Invalid configuration: {e}") from e

    @classmethod
    def parse(cls, text: str) -> "RunConfig":
        """Parse canonical key=value text (or a JSON object)."""
        stripped = text.lstrip()
        if stripped.startswith("{"):
            try:
                data = json.loads(text)
            except json.JSONDecodeError as e:
                raise ConfigError(f"Malformed JSON config: {e}") from e
            if not isinstance(data, dict):
                raise ConfigError("A JSON config must be an object")
            unknown = [k for k in data if k not in cls.model_fields]
            if unknown:
                raise ConfigError(f"Unknown config keys {unknown}")
            return cls._build(data)
        flat: Dict[str, str] = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"Malformed config line '{line}'")
            flat[key.strip()] = value.strip()
        return cls.from_flat(flat)

    @classmethod
    def load(cls, path: str) -> "RunConfig":
        """Load a flat key=value file (dotenv syntax) or a .json file."""
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"Config file {path} not found")
        if p.suffix == ".json":
            return cls.parse(p.read_text())
        return cls.from_flat(dict(dotenv_values(p)))

    def config_hash(self) -> str:
        return hashlib.sha256(self.serialize().encode()).hexdigest()[:16]

    def tolerance(self, name: str) -> float:
        return self.tolerances[name]
