from src.seeds.fields import ClosedForm, Jet, JetSource, ScalarField, fd_jet
from src.seeds.grid import Grid2
from src.seeds.radial import RadialProfile, solve_radial_mode
from src.seeds.seeds import SeedKind, SeedSpec, linear_residual, make_seed, parse_seed

__all__ = [
    "ClosedForm",
    "Grid2",
    "Jet",
    "JetSource",
    "RadialProfile",
    "ScalarField",
    "SeedKind",
    "SeedSpec",
    "fd_jet",
    "linear_residual",
    "make_seed",
    "parse_seed",
    "solve_radial_mode",
]
