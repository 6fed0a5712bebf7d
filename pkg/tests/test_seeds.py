import numpy as np
import pytest
from loguru import logger
from scipy.special import i0, i1

from src.core.errors import DomainError, IncompatibleSeedError
from src.potential import derive_joyce_data, logdet, power
from src.seeds import (
    Grid2,
    JetSource,
    ScalarField,
    SeedKind,
    linear_residual,
    make_seed,
    parse_seed,
    solve_radial_mode,
)

LOGDET = derive_joyce_data(logdet())
SQUARE = derive_joyce_data(power(0.25))
EXPONENTIAL = derive_joyce_data(power(0.5))


def _grid(domain=(0.0, 1.0, 1.0, 2.0), shape=(33, 33)) -> Grid2:
    return Grid2.from_domain(domain, shape)


def _residual_linf(text, jd, grid=None):
    xi = make_seed(parse_seed(text), jd, grid or _grid())
    return float(np.max(np.abs(linear_residual(xi, jd).values)))


def test_parse_seed_specs():
    assert parse_seed("H").kind == SeedKind.COORDINATE_H
    assert parse_seed("logr").kind == SeedKind.RADIAL
    spec = parse_seed("pointsource:0.5")
    assert spec.kind == SeedKind.POINT_SOURCE and spec.params == (0.5,)
    spec = parse_seed("mode:1:0:1:0")
    assert spec.kind == SeedKind.SEPARABLE_MODE and spec.params == (1.0, 0.0, 1.0, 0.0)
    assert parse_seed("expr:H/r").name == "H/r"

    for bad in ("Z", "mode:1:0", "mode:0:0:1:0", "expr:sin", "pointsource:x"):
        with pytest.raises(IncompatibleSeedError):
            parse_seed(bad)


def test_closed_form_solutions_have_zero_residual():
    logger.info("Testing linear residuals of the closed-form seeds...")
    assert _residual_linf("H", LOGDET) <= 1e-12
    assert _residual_linf("H", SQUARE) <= 1e-12
    assert _residual_linf("logr", LOGDET) <= 1e-12
    assert _residual_linf("expr:H/r", SQUARE) <= 1e-12
    assert _residual_linf("expr:H2/r-r", SQUARE) <= 1e-12
    assert _residual_linf("expr:H2-r2/2", LOGDET) <= 1e-12
    assert _residual_linf("expr:Hq", EXPONENTIAL, _grid((0.0, 1.0, -1.0, 1.0))) <= 1e-12
    logger.success("Closed-form seeds solve the linear equation.")


def test_radial_seed_with_quadrature_primitive():
    # No closed-form primitive of 1/p for the dual weight: quadrature fills in
    from src.potential import dual_joyce

    jd = dual_joyce(SQUARE)
    assert jd.q is None
    grid = _grid((0.0, 1.0, -2.0, -1.0))
    xi = make_seed(parse_seed("radial"), jd, grid)
    assert np.max(np.abs(linear_residual(xi, jd).values)) <= 1e-10
    # q' = 1/p, so the values follow the jet
    fd = np.gradient(xi.values, grid.hr, axis=1, edge_order=2)
    assert np.max(np.abs(fd - xi.jet.dr)) < 5e-3


def test_point_source():
    grid = _grid((-1.0, 1.0, 0.5, 1.5))
    xi = make_seed(parse_seed("pointsource:0"), LOGDET, grid)
    HH, RR = grid.mesh()
    assert np.allclose(xi.values, (HH**2 + RR**2) ** -0.5, rtol=1e-14)
    assert np.max(np.abs(linear_residual(xi, LOGDET).values)) <= 1e-10


def test_non_solution_residual_is_two():
    residual = linear_residual(make_seed(parse_seed("expr:H2"), LOGDET, _grid()), LOGDET)
    assert np.allclose(residual.values, 2.0, rtol=0, atol=1e-12)


def test_incompatible_weight_is_refused():
    with pytest.raises(IncompatibleSeedError):
        make_seed(parse_seed("logr"), SQUARE, _grid())
    with pytest.raises(IncompatibleSeedError):
        make_seed(parse_seed("expr:H/r"), LOGDET, _grid())
    with pytest.raises(IncompatibleSeedError):
        make_seed(parse_seed("pointsource:0"), SQUARE, _grid())


def test_grid_outside_interval_is_refused():
    with pytest.raises(DomainError):
        make_seed(parse_seed("H"), LOGDET, _grid((0.0, 1.0, 0.0, 1.0)))


def test_finite_difference_jet_converges():
    """Sampled log r: the FD residual decays at second order."""
    errors = []
    for n in (17, 33, 65):
        grid = _grid(shape=(n, n))
        _, RR = grid.mesh()
        xi = ScalarField.from_values(grid, np.log(RR), name="logr-sampled")
        assert xi.jet_source == JetSource.FINITE_DIFFERENCE
        errors.append(linear_residual(xi, LOGDET).interior_norms().linf)
    order = np.log2(errors[0] / errors[1]), np.log2(errors[1] / errors[2])
    logger.info(f"FD residuals {errors}, orders {order}")
    assert min(order) > 1.8


def test_separable_mode_seed():
    grid = _grid((0.0, 2.0, 1.0, 2.0), (33, 41))
    xi = make_seed(parse_seed("mode:2:0.3:1:0.5"), LOGDET, grid)
    assert xi.jet_source == JetSource.ODE
    assert np.max(np.abs(linear_residual(xi, LOGDET).values)) <= 1e-10


def test_radial_mode_constant_for_k_zero():
    profile = solve_radial_mode(0.0, LOGDET, (0.5, 2.0), (1.0, 0.0), 31)
    assert np.all(profile.R == 1.0)
    assert np.all(profile.dR == 0.0)


def test_radial_mode_matches_bessel_series():
    """(r R')' = r R is solved by I0, whose series is sum (r/2)^{2m} / (m!)^2."""
    r0, r1 = 0.5, 2.0
    profile = solve_radial_mode(1.0, LOGDET, (r0, r1), (float(i0(r0)), float(i1(r0))), 151)
    assert np.max(np.abs(profile.R - i0(profile.r))) <= 1e-8
    assert np.max(np.abs(profile.dR - i1(profile.r))) <= 1e-8


def test_radial_mode_rk4_self_convergence():
    runs = [solve_radial_mode(1.0, EXPONENTIAL, (0.0, 2.0), (1.0, 0.0), 21, substeps=s).R for s in (1, 2, 4)]
    coarse = np.max(np.abs(runs[0] - runs[1]))
    fine = np.max(np.abs(runs[1] - runs[2]))
    order = np.log2(coarse / fine)
    logger.info(f"RK4 self-convergence order {order:.2f}")
    assert 3.5 <= order <= 4.5
