import unittest
from dataclasses import replace

import numpy as np
import pytest
from loguru import logger

from src.construct import (
    ChartEvaluator,
    OneForm,
    assemble_chart,
    build_forms,
    chart_identities,
    closedness_residual,
    integrate_potential,
    nondegeneracy_mask,
)
from src.core.errors import ClosednessError, NondegeneracyError, SingularJacobianError
from src.potential import derive_joyce_data, logdet, power
from src.seeds import Grid2, make_seed, parse_seed
from src.verify import hessian_via_chain

LOGDET = derive_joyce_data(logdet())


def seeds(first, second, jd=LOGDET, domain=(0.0, 1.0, 1.0, 2.0), shape=(33, 33)):
    grid = Grid2.from_domain(domain, shape)
    return make_seed(parse_seed(first), jd, grid), make_seed(parse_seed(second), jd, grid)


class TestForms(unittest.TestCase):
    def test_worked_forms(self):
        xi1, xi2 = seeds("H", "logr")
        eps1, eps2, eps = build_forms(xi1, xi2, LOGDET)
        HH, RR = xi1.grid.mesh()
        np.testing.assert_allclose(eps1.a, 1.0, atol=1e-15)
        np.testing.assert_allclose(eps1.b, 0.0, atol=1e-15)
        np.testing.assert_allclose(eps2.a, 0.0, atol=1e-15)
        np.testing.assert_allclose(eps2.b, RR, rtol=1e-15)
        np.testing.assert_allclose(eps.a, HH, atol=1e-15)
        np.testing.assert_allclose(eps.b, RR * np.log(RR), rtol=1e-14, atol=1e-15)
        for form in (eps1, eps2, eps):
            self.assertLessEqual(closedness_residual(form).linf, 1e-12)

    def test_dependent_pair_forms(self):
        xi1, xi2 = seeds("H", "H")
        eps1, eps2, eps = build_forms(xi1, xi2, LOGDET)
        _, RR = xi1.grid.mesh()
        np.testing.assert_allclose(eps1.b, -RR)
        np.testing.assert_allclose(eps2.b, RR)
        np.testing.assert_allclose(eps.a, 0.0, atol=1e-15)
        np.testing.assert_allclose(eps.b, 0.0, atol=1e-14)

    def test_non_solution_is_not_closed(self):
        xi1, xi2 = seeds("H", "expr:H2")
        eps1, _, _ = build_forms(xi1, xi2, LOGDET)
        _, RR = xi1.grid.mesh()
        report = closedness_residual(eps1)
        # d(eps1) = -p L[xi2] = -2r
        np.testing.assert_allclose(report.field, -2.0 * RR, rtol=1e-13)
        with self.assertRaises(ClosednessError) as ctx:
            integrate_potential(eps1, (0, 0))
        self.assertTrue(ctx.exception.nodes)

    def test_integrate_exact_forms(self):
        grid = Grid2.from_domain((0.0, 1.0, 1.0, 2.0), (17, 17))
        HH, RR = grid.mesh()
        zero = np.zeros_like(HH)
        phi = integrate_potential(OneForm(grid, np.ones_like(HH), zero), (3, 5)).field
        np.testing.assert_allclose(phi.values, HH - HH[3, 5], atol=1e-14)
        phi = integrate_potential(OneForm(grid, zero, RR), (0, 0)).field
        np.testing.assert_allclose(phi.values, (RR**2 - 1.0) / 2.0, atol=1e-12)
        with self.assertRaises(ClosednessError):
            integrate_potential(OneForm(grid, zero, HH), (0, 0))


class TestNondegeneracy(unittest.TestCase):
    def test_masks(self):
        xi1, xi2 = seeds("H", "logr")
        nd = nondegeneracy_mask(xi1, xi2)
        _, RR = xi1.grid.mesh()
        np.testing.assert_allclose(nd.det, 1.0 / RR)
        self.assertTrue(nd.covers_grid)

        self.assertTrue(nondegeneracy_mask(*seeds("H", "H")).empty)
        reversed_pair = nondegeneracy_mask(*seeds("logr", "H"))
        self.assertTrue(reversed_pair.empty)
        self.assertTrue(np.all(reversed_pair.det < 0))

    def test_refused_pairs(self):
        for pair in (("H", "H"), ("logr", "H")):
            with self.assertRaises(NondegeneracyError):
                assemble_chart(*seeds(*pair), LOGDET)

    def test_partially_degenerate_pair_is_restricted(self):
        logger.info("Testing a seed pair whose Jacobian changes sign inside the domain...")
        # det = 2H / r: positive from node 11 on (H = 1/64)
        xi1, xi2 = seeds("expr:H2-r2/2", "logr", domain=(-0.5, 1.0, 1.0, 2.0))
        chart = assemble_chart(xi1, xi2, LOGDET)
        self.assertEqual(chart.grid.shape, (22, 33))
        self.assertAlmostEqual(chart.grid.H_range[0], 1.0 / 64)
        self.assertEqual(chart.grid.r_range, (1.0, 2.0))
        self.assertTrue(np.all(chart.detB > 0.0))
        self.assertTrue(chart_identities(chart).passed)
        logger.success("Chart restricted to the nondegenerate rectangle.")

    def test_restriction_keeps_the_base_node(self):
        xi1, xi2 = seeds("expr:H2-r2/2", "logr", domain=(-0.5, 1.0, 1.0, 2.0))
        chart = assemble_chart(xi1, xi2, LOGDET, base=(20, 5))
        self.assertEqual(chart.gauge.base_index, (9, 5))
        np.testing.assert_allclose(chart.gauge.base_point, xi1.grid.node(20, 5), rtol=1e-14)
        self.assertEqual(chart.x1.values[9, 5], 0.0)

    def test_base_in_the_degenerate_part_is_refused(self):
        xi1, xi2 = seeds("expr:H2-r2/2", "logr", domain=(-0.5, 1.0, 1.0, 2.0))
        with self.assertRaises(NondegeneracyError):
            assemble_chart(xi1, xi2, LOGDET, base=(4, 5))


class TestWorkedChart(unittest.TestCase):
    def setUp(self):
        logger.info("Assembling the worked chart (logdet, H, log r) on 129x129...")
        self.xi1, self.xi2 = seeds("H", "logr", shape=(129, 129))
        self.chart = assemble_chart(self.xi1, self.xi2, LOGDET, potential="logdet")
        self.HH, self.RR = self.chart.grid.mesh()

    def test_matches_closed_form(self):
        HH, RR = self.HH, self.RR
        np.testing.assert_allclose(self.chart.x1.values, HH, atol=1e-12)
        np.testing.assert_allclose(self.chart.x2.values, (RR**2 - 1.0) / 2.0, atol=1e-12)
        u = HH**2 / 2 + RR**2 / 2 * np.log(RR) - RR**2 / 4 + 0.25
        self.assertLessEqual(float(np.max(np.abs(self.chart.u.values - u))), 1e-6)
        np.testing.assert_allclose(self.chart.J, RR**-2, rtol=1e-14)
        # seed log r: J = exp(-2 xi2)
        np.testing.assert_allclose(self.chart.J, np.exp(-2.0 * self.chart.xi2.values), rtol=1e-13)
        self.assertTrue(self.chart.analytic)
        logger.success("Worked chart reproduces the hand-integrated closed form.")

    def test_u_as_function_of_x(self):
        # u(x) = x1^2/2 + (x2/2)(log 2 x2 - 1) once x2 is shifted to r^2/2
        x1 = self.chart.x1.values
        x2 = self.chart.x2.values + 0.5
        expected = x1**2 / 2 + x2 / 2 * (np.log(2 * x2) - 1)
        offset = self.chart.u.values - expected
        self.assertLessEqual(float(np.ptp(offset)), 1e-6)

    def test_identities(self):
        report = chart_identities(self.chart)
        self.assertTrue(report.passed)
        self.assertLessEqual(report.jp2_defect, 1e-12)
        self.assertLessEqual(report.isothermal_defect, 1e-12)
        self.assertGreater(report.detB_min, 0.0)
        self.assertLessEqual(max(self.chart.closedness.values()), 1e-12)

    def test_hessian_via_chain(self):
        chain = hessian_via_chain(self.chart)
        np.testing.assert_allclose(chain.field[..., 0, 0], 1.0, rtol=1e-14)
        np.testing.assert_allclose(chain.field[..., 1, 1], self.RR**-2, rtol=1e-14)
        np.testing.assert_allclose(chain.field[..., 0, 1], 0.0, atol=1e-15)
        self.assertLessEqual(chain.det_defect, 1e-12)

    def test_evaluator_agrees_with_nodes(self):
        evaluator = ChartEvaluator.for_chart(self.chart)
        self.assertIsNotNone(evaluator)
        pot, forms = evaluator.evaluate(self.HH[::16, ::16], self.RR[::16, ::16])
        np.testing.assert_allclose(pot[..., 0], self.chart.x1.values[::16, ::16], atol=1e-12)
        np.testing.assert_allclose(pot[..., 1], self.chart.x2.values[::16, ::16], atol=1e-12)
        np.testing.assert_allclose(pot[..., 2], self.chart.u.values[::16, ::16], atol=1e-8)
        np.testing.assert_allclose(forms.A, self.chart.A[::16, ::16], rtol=1e-14)

    def test_base_point_gauge(self):
        chart = assemble_chart(self.xi1, self.xi2, LOGDET, base=(64, 64))
        self.assertEqual(chart.gauge.base_index, (64, 64))
        self.assertEqual(chart.x1.values[64, 64], 0.0)
        self.assertEqual(chart.u.values[64, 64], 0.0)
        # gauges differ by constants
        self.assertLessEqual(float(np.ptp(chart.u.values - self.chart.u.values)), 1e-8)


class TestSquareWeight(unittest.TestCase):
    def test_square_weight_chart(self):
        jd = derive_joyce_data(power(0.25))
        # det = H^2/r^2 + 1 > 0 in this order
        xi1, xi2 = seeds("expr:H2/r-r", "H", jd=jd, domain=(0.0, 1.0, 1.0, 2.0))
        chart = assemble_chart(xi1, xi2, jd)
        report = chart_identities(chart)
        self.assertTrue(report.passed)


def test_singular_jacobian_is_localized():
    """A chart with detA = 0 at one node is refused at that node."""
    xi1, xi2 = seeds("H", "logr", shape=(9, 9))
    chart = assemble_chart(xi1, xi2, LOGDET)
    A = chart.A.copy()
    A[8, 8] = 0.0
    detA = chart.detA.copy()
    detA[8, 8] = 0.0
    with pytest.raises(SingularJacobianError) as excinfo:
        hessian_via_chain(replace(chart, A=A, detA=detA))
    assert excinfo.value.nodes == [(8, 8)]


if __name__ == "__main__":
    unittest.main()
