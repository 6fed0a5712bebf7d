from src.potential.builtins import affine, from_csv, logdet, parse_potential, power, tabulated
from src.potential.joyce import (
    derive_joyce_data,
    dual_joyce,
    dual_potential,
    eval_joyce,
    f_of_J,
    validate_potential,
)
from src.potential.models import JoyceData, JoyceEval, Potential, PotentialKind, Provenance, WeightKind

__all__ = [
    "JoyceData",
    "JoyceEval",
    "Potential",
    "PotentialKind",
    "Provenance",
    "WeightKind",
    "affine",
    "derive_joyce_data",
    "dual_joyce",
    "dual_potential",
    "eval_joyce",
    "f_of_J",
    "from_csv",
    "logdet",
    "parse_potential",
    "power",
    "tabulated",
    "validate_potential",
]
