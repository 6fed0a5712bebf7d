from src.verify.checks import ConvexityReport, convexity_legendre_check
from src.verify.convergence import convergence_study, fitted_order
from src.verify.flux import VField, compute_v_field, divergence, fd_hessian
from src.verify.functional import FirstVariation, compact_bumps, functional_and_first_variation, functional_value
from src.verify.hessian import ChainHessian, hessian_via_chain
from src.verify.models import ResidualReport, SolutionProvenance, XGrid, XGridSolution
from src.verify.resample import chart_box, closed_form_solution, inscribed_box, resample_to_xgrid
from src.verify.residuals import euler_lagrange_residual, flux_residual

__all__ = [
    "ChainHessian",
    "ConvexityReport",
    "FirstVariation",
    "ResidualReport",
    "SolutionProvenance",
    "VField",
    "XGrid",
    "XGridSolution",
    "chart_box",
    "closed_form_solution",
    "compact_bumps",
    "compute_v_field",
    "convergence_study",
    "convexity_legendre_check",
    "divergence",
    "euler_lagrange_residual",
    "fd_hessian",
    "fitted_order",
    "flux_residual",
    "functional_and_first_variation",
    "functional_value",
    "hessian_via_chain",
    "inscribed_box",
    "resample_to_xgrid",
]
