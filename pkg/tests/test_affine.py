import unittest

import numpy as np
import pytest
from loguru import logger

from src.affine import (
    HARMONICS,
    HarmonicTriple,
    affine_invariant_check,
    align_with_chart,
    chern_terng_integrate,
    curvature_identity,
    donaldson_surface,
    equivalence_check,
    harmonic_field,
    lift_harmonic_to_seed,
    require_harmonic,
)
from src.construct import assemble_chart
from src.core.errors import IncompatibleSeedError, NonHarmonicError
from src.potential import affine, derive_joyce_data, logdet
from src.seeds import Grid2, linear_residual, make_seed, parse_seed
from src.verify import XGrid, closed_form_solution

LOGDET = derive_joyce_data(logdet())
AFFINE = derive_joyce_data(affine())
BOX = (0.0, 1.0, 1.0, 2.0)


def _grid(n=33):
    return Grid2.from_domain(BOX, (n, n))


def _triple(names, grid):
    return HarmonicTriple.build(*(harmonic_field(name, grid) for name in names))


class TestHarmonic(unittest.TestCase):
    def test_known_harmonics(self):
        grid = _grid(9)
        for name in HARMONICS:
            F = harmonic_field(name, grid)
            if name == "l1^2":
                with self.assertRaises(NonHarmonicError):
                    require_harmonic(F)
            else:
                self.assertEqual(require_harmonic(F), 0.0)

    def test_unknown_name(self):
        with self.assertRaises(IncompatibleSeedError):
            harmonic_field("sin(l1)", _grid(9))


class TestChernTerng(unittest.TestCase):
    def test_linear_triple_gives_paraboloid(self):
        logger.info("Integrating the Chern-Terng system for F = (l1, l2, 1)...")
        grid = _grid()
        surface = chern_terng_integrate(_triple(("l1", "l2", "const"), grid))
        HH, RR = grid.mesh()
        # Z = (-l1, -l2, |l|^2 / 2) up to the base point at (0, 1)
        np.testing.assert_allclose(surface.Z[..., 0], -HH, atol=1e-12)
        np.testing.assert_allclose(surface.Z[..., 1], -(RR - 1.0), atol=1e-12)
        np.testing.assert_allclose(surface.Z[..., 2], 0.5 * (HH**2 + RR**2) - 0.5, atol=1e-12)
        self.assertLessEqual(surface.discrepancy, 1e-12)
        self.assertFalse(surface.degenerate)
        logger.success("Chern-Terng surface is the expected paraboloid.")

    def test_constant_triple_is_degenerate(self):
        surface = chern_terng_integrate(_triple(("const", "const", "const"), _grid(9)))
        self.assertTrue(surface.degenerate)
        self.assertEqual(float(np.max(np.abs(surface.Z))), 0.0)

    def test_non_harmonic_member_is_refused(self):
        with self.assertRaises(NonHarmonicError) as ctx:
            chern_terng_integrate(_triple(("l1^2", "l2", "const"), _grid(9)))
        self.assertEqual(len(ctx.exception.nodes), 20)


class TestLift(unittest.TestCase):
    def test_lift_of_l1(self):
        grid = _grid()
        xi = lift_harmonic_to_seed(harmonic_field("l1", grid), AFFINE)
        HH, RR = grid.mesh()
        np.testing.assert_allclose(xi.values, HH / RR, atol=1e-7)
        self.assertLessEqual(float(np.max(np.abs(linear_residual(xi, AFFINE).values))), 1e-10)
        self.assertIsNotNone(xi.closed_form)

    def test_lift_of_r_is_constant(self):
        xi = lift_harmonic_to_seed(harmonic_field("r", _grid()), AFFINE)
        np.testing.assert_allclose(xi.values, 1.0, atol=1e-13)

    def test_lift_needs_square_weight(self):
        with self.assertRaises(IncompatibleSeedError):
            lift_harmonic_to_seed(harmonic_field("l1", _grid(9)), LOGDET)


class TestSurfaces(unittest.TestCase):
    def test_seed_surface_matches_chart(self):
        logger.info("Comparing the seed-pair surface with the worked chart...")
        grid = _grid(129)
        xi1, xi2 = make_seed(parse_seed("H"), LOGDET, grid), make_seed(parse_seed("logr"), LOGDET, grid)
        chart = assemble_chart(xi1, xi2, LOGDET)
        surface = donaldson_surface(xi1, xi2, LOGDET)
        alignment = align_with_chart(surface, chart, tol=1e-5)
        logger.info(f"Alignment offset {alignment.offset}, Linf {alignment.linf}")
        self.assertTrue(alignment.passed)

    def test_routes_agree(self):
        grid = _grid()
        for second in ("l1*l2", "l1^2-l2^2"):
            report, route_a, route_b = equivalence_check(harmonic_field("l1", grid), harmonic_field(second, grid))
            self.assertTrue(report.passed, msg=f"l1 with {second}: {report.linf:.3e}")
            self.assertEqual(report.grid, (33, 33))
            self.assertEqual(route_a.faces.shape, ((32 * 32), 4))
            self.assertGreater(route_b.area, 0.0)

    def test_non_harmonic_route_is_refused(self):
        grid = _grid(9)
        with self.assertRaises(NonHarmonicError):
            equivalence_check(harmonic_field("l1", grid), harmonic_field("l1^2", grid))


class TestAffineInvariant(unittest.TestCase):
    def setUp(self):
        self.sol = closed_form_solution(XGrid.from_box((-1.0, 1.0, -1.0, 1.0), 17), lambda a, b: 0.5 * (a**2 + b**2), name="paraboloid")

    def test_paraboloid(self):
        lhs, rhs = curvature_identity(self.sol)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-13)
        report = affine_invariant_check(self.sol)
        self.assertTrue(report.passed)
        self.assertLessEqual(report.unimodular_defect, 1e-8)

    def test_non_unimodular_map(self):
        report = affine_invariant_check(self.sol, M=((2.0, 0.0), (0.0, 1.0)))
        self.assertAlmostEqual(report.det_M, 2.0)
        self.assertFalse(report.passed)


@pytest.mark.parametrize("name", ["l1", "l1*l2", "l1^2-l2^2"])
def test_lifted_seeds_solve_the_linear_equation(name):
    xi = lift_harmonic_to_seed(harmonic_field(name, _grid(17)), AFFINE)
    assert float(np.max(np.abs(linear_residual(xi, AFFINE).values))) <= 1e-10
