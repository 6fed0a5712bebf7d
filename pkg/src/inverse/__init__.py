from src.inverse.conjugate import HarmonicConjugate, conjugate_H
from src.inverse.inversion import Preimage, invert_sampled_map
from src.inverse.legendre import legendre_transform_grid
from src.inverse.ordinary import OrdinaryMask, ordinary_point_mask, solution_J
from src.inverse.recover import GaugeFit, RecoveredSeeds, fit_gauge, recover_seeds
from src.verify.flux import VField, compute_v_field

__all__ = [
    "GaugeFit",
    "HarmonicConjugate",
    "OrdinaryMask",
    "Preimage",
    "RecoveredSeeds",
    "VField",
    "compute_v_field",
    "conjugate_H",
    "fit_gauge",
    "invert_sampled_map",
    "legendre_transform_grid",
    "ordinary_point_mask",
    "recover_seeds",
    "solution_J",
]
