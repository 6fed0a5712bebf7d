from src.affine.chern_terng import chern_terng_integrate
from src.affine.donaldson import CHART_ROTATION, SurfaceChartAlignment, align_with_chart, donaldson_surface
from src.affine.equivalence import EquivalenceReport, equivalence_check
from src.affine.harmonic import HARMONICS, HarmonicTriple, harmonic_defect, harmonic_field, laplacian, require_harmonic
from src.affine.invariant import AffineInvariantReport, affine_invariant_check, curvature_identity, unimodular_defect
from src.affine.lift import lift_harmonic_to_seed, lifted_form
from src.affine.surface import Surface, integrate_surface, quad_faces

__all__ = [
    "AffineInvariantReport",
    "CHART_ROTATION",
    "EquivalenceReport",
    "HARMONICS",
    "HarmonicTriple",
    "Surface",
    "SurfaceChartAlignment",
    "affine_invariant_check",
    "align_with_chart",
    "chern_terng_integrate",
    "curvature_identity",
    "donaldson_surface",
    "equivalence_check",
    "harmonic_defect",
    "harmonic_field",
    "integrate_surface",
    "laplacian",
    "lift_harmonic_to_seed",
    "lifted_form",
    "quad_faces",
    "require_harmonic",
    "unimodular_defect",
]
