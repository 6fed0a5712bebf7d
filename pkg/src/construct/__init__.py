from src.construct.chart import (
    Chart,
    ChartIdentityReport,
    Gauge,
    NondegeneracyMask,
    assemble_chart,
    chart_identities,
    jacobians,
    largest_rectangle,
    nondegeneracy_mask,
    restrict_seeds,
)
from src.construct.evaluator import ChartEvaluator
from src.construct.forms import (
    ClosednessReport,
    FormJet,
    OneForm,
    Primitive,
    build_forms,
    closedness_residual,
    integrate_potential,
)

__all__ = [
    "Chart",
    "ChartEvaluator",
    "ChartIdentityReport",
    "ClosednessReport",
    "FormJet",
    "Gauge",
    "NondegeneracyMask",
    "OneForm",
    "Primitive",
    "assemble_chart",
    "build_forms",
    "chart_identities",
    "closedness_residual",
    "integrate_potential",
    "jacobians",
    "largest_rectangle",
    "nondegeneracy_mask",
    "restrict_seeds",
]
