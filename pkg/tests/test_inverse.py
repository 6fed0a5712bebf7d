import unittest

import numpy as np
import pytest
from loguru import logger

from src.construct import assemble_chart
from src.core.errors import NoOrdinaryPointsError, OutsideImageError
from src.inverse import (
    VField,
    compute_v_field,
    conjugate_H,
    invert_sampled_map,
    legendre_transform_grid,
    ordinary_point_mask,
    recover_seeds,
)
from src.potential import derive_joyce_data, dual_potential, logdet
from src.seeds import Grid2, make_seed, parse_seed
from src.verify import XGrid, chart_box, closed_form_solution, convergence_study, euler_lagrange_residual, resample_to_xgrid

LOGDET_POT = logdet()
LOGDET = derive_joyce_data(LOGDET_POT)
UNIT = (-1.0, 1.0, -1.0, 1.0)
WORKED_BOX = (0.0, 1.0, 1.0, 2.0)


def paraboloid(x1, x2):
    return 0.5 * (x1**2 + x2**2)


def worked(x1, x2):
    return 0.5 * x1**2 + 0.5 * x2 * (np.log(2.0 * x2) - 1.0)


def worked_chart(n=65):
    grid = Grid2.from_domain(WORKED_BOX, (n, n))
    return assemble_chart(make_seed(parse_seed("H"), LOGDET, grid), make_seed(parse_seed("logr"), LOGDET, grid), LOGDET)


class TestOrdinaryPoints(unittest.TestCase):
    def test_worked_solution_is_ordinary_everywhere(self):
        sol = closed_form_solution(XGrid.from_box(WORKED_BOX, 33), worked)
        mask = ordinary_point_mask(sol, LOGDET)
        self.assertTrue(mask.mask.all())
        self.assertEqual(mask.rect, (0, 32, 0, 32))

    def test_quadratic_has_no_ordinary_points(self):
        sol = closed_form_solution(XGrid.from_box(UNIT, 17), paraboloid)
        mask = ordinary_point_mask(sol, LOGDET)
        self.assertFalse(mask.mask.any())
        self.assertTrue(mask.empty)


class TestConjugate(unittest.TestCase):
    def test_worked_conjugate_is_x1(self):
        logger.info("Testing the conjugate Hamiltonian of the worked solution...")
        sol = closed_form_solution(XGrid.from_box(WORKED_BOX, 129), worked)
        v = compute_v_field(sol, LOGDET)
        H = conjugate_H(v, base=(0, 0))
        X1, _ = sol.grid.mesh()
        self.assertEqual(H.values[0, 0], 0.0)
        self.assertLess(float(np.max(np.abs(H.values - X1))), 1e-2)
        self.assertLessEqual(H.divergence, 5e-3)

    def test_worked_conjugate_converges(self):
        logger.info("Testing the conjugate Hamiltonian under grid refinement...")
        errors, divergences = [], []
        for n in (33, 65, 129):
            sol = closed_form_solution(XGrid.from_box(WORKED_BOX, n), worked)
            H = conjugate_H(compute_v_field(sol, LOGDET), base=(0, 0))
            X1, _ = sol.grid.mesh()
            errors.append(float(np.max(np.abs(H.values - X1))))
            divergences.append(H.divergence)
        logger.info(f"Errors {errors}, relative divergences {divergences}")
        self.assertTrue(errors[0] > errors[1] > errors[2])
        self.assertGreater(errors[0] / errors[2], 6.0)
        self.assertTrue(divergences[0] > divergences[2])
        self.assertLessEqual(max(divergences), 5e-3)
        logger.success("Conjugate Hamiltonian converges to x1.")

    def test_zero_flux(self):
        grid = XGrid.from_box(UNIT, 9)
        zero = np.zeros(grid.shape)
        H = conjugate_H(VField(grid=grid, v1=zero, v2=zero, r=np.ones(grid.shape), f_scale=-0.5))
        self.assertEqual(float(np.max(np.abs(H.values))), 0.0)
        self.assertEqual(H.divergence, 0.0)


class TestInversion(unittest.TestCase):
    def setUp(self):
        self.grid = XGrid.from_box(UNIT, 17)
        X1, X2 = self.grid.mesh()
        self.c0, self.c1 = 2.0 * X1 + X2, X2

    def test_affine_map_is_inverted(self):
        t0 = np.array([[0.3, -0.2], [1.0, 0.0]])
        t1 = np.array([[0.1, 0.5], [-0.4, 0.0]])
        pre = invert_sampled_map(self.grid, self.c0, self.c1, t0, t1)
        np.testing.assert_allclose(pre.x2, t1, atol=1e-12)
        np.testing.assert_allclose(pre.x1, (t0 - t1) / 2.0, atol=1e-12)

    def test_targets_outside_the_image(self):
        with self.assertRaises(OutsideImageError) as ctx:
            invert_sampled_map(self.grid, self.c0, self.c1, np.array([0.0, 10.0]), np.array([0.0, 0.0]))
        self.assertEqual(ctx.exception.nodes, [(1,)])


class TestRecoverSeeds(unittest.TestCase):
    def test_worked_round_trip(self):
        logger.info("Testing seed recovery from the resampled worked chart...")
        chart = worked_chart()
        sol = resample_to_xgrid(chart, XGrid.from_box(chart_box(chart), 65))
        rec = recover_seeds(sol, LOGDET, reference=(chart.xi1, chart.xi2))
        logger.info(f"Gauge {rec.gauge.as_dict()}, residuals {rec.residual1:.3e}, {rec.residual2:.3e}")
        self.assertLessEqual(rec.gauge.linf, 5e-3)
        self.assertTrue(np.all(rec.r > 0.0))
        self.assertEqual(rec.grid.shape, (65, 65))
        logger.success("Seeds recovered up to the H-translation gauge.")

    def test_base_is_reindexed_into_the_ordinary_rectangle(self):
        # |grad J| = 1 / (2 x2^2) exceeds 0.25 only for x2 < sqrt(2): columns 0..26
        sol = closed_form_solution(XGrid.from_box(WORKED_BOX, 65), worked)
        rec = recover_seeds(sol, LOGDET, base=(32, 10), delta=0.5)
        self.assertEqual(rec.xgrid.shape, (65, 27))
        self.assertEqual(rec.H[32, 10], 0.0)
        X1, _ = rec.xgrid.mesh()
        self.assertLess(float(np.max(np.abs(rec.H - (X1 - 0.5)))), 1e-2)

    def test_quadratic_is_refused(self):
        sol = closed_form_solution(XGrid.from_box(UNIT, 17), paraboloid)
        with self.assertRaises(NoOrdinaryPointsError):
            recover_seeds(sol, LOGDET)


class TestLegendre(unittest.TestCase):
    def test_paraboloid_is_self_dual(self):
        sol = closed_form_solution(XGrid.from_box(UNIT, 17), paraboloid, lambda x1, x2: (x1, x2))
        star = legendre_transform_grid(sol)
        T1, T2 = star.grid.mesh()
        np.testing.assert_allclose(star.u, paraboloid(T1, T2), atol=1e-10)
        np.testing.assert_allclose(star.xi1, T1, atol=1e-10)
        np.testing.assert_allclose(star.J, 1.0, rtol=1e-8)
        self.assertTrue(star.name.startswith("legendre("))

    def test_dual_solves_the_dual_equation(self):
        logger.info("Testing the Euler-Lagrange residual of the Legendre dual...")
        chart = worked_chart()
        box = chart_box(chart)
        xi_box = legendre_transform_grid(resample_to_xgrid(chart, XGrid.from_box(box, 17))).grid.box
        star_pot = dual_potential(LOGDET_POT)

        def producer(n):
            star = legendre_transform_grid(resample_to_xgrid(chart, XGrid.from_box(box, n)), target=XGrid.from_box(xi_box, n))
            return euler_lagrange_residual(star, star_pot)

        study = convergence_study(producer, [17, 33, 65], tol=1e-4)
        logger.info(f"Dual residuals {study.linf}, round-off floors {study.noise}")
        # the discrete dual equation holds exactly; what is left is round-off
        self.assertTrue(all(v <= n for v, n in zip(study.linf, study.noise)))
        self.assertLess(study.linf[-1], 1e-4)
        self.assertIsNone(study.order)
        self.assertTrue(study.passed)
        self.assertIn("round-off", study.notes[0])
        logger.success("Dual residual sits at the round-off floor on every level.")

    def test_closed_form_dual_is_exact(self):
        # u* = xi1^2 / 2 + exp(2 xi2) / 4 solves the equation of psi*(t) = t log t
        star_pot = dual_potential(LOGDET_POT)
        for n in (17, 33):
            sol = closed_form_solution(XGrid.from_box((0.0, 1.0, 0.0, 0.7), n), lambda a, b: 0.5 * a**2 + 0.25 * np.exp(2.0 * b))
            report = euler_lagrange_residual(sol, star_pot)
            self.assertLessEqual(report.finest_linf, report.noise[0])


@pytest.mark.parametrize("base", [(0, 0), (8, 8), (16, 4)])
def test_conjugate_base_point_is_zero(base):
    sol = closed_form_solution(XGrid.from_box(WORKED_BOX, 17), worked)
    H = conjugate_H(compute_v_field(sol, LOGDET), base=base, tol=1e-1)
    assert H.values[base] == 0.0
