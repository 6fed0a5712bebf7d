"""
Pipeline runner - one method per CLI subcommand.

Each pipeline builds its inputs from a RunConfig, runs the checks, writes
the requested exports (every file carries the config hash) and returns a
RunOutcome whose ``passed`` flag decides the exit code.
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from loguru import logger

from src.affine import affine_invariant_check, equivalence_check, harmonic_field
from src.construct import Chart, assemble_chart, chart_identities
from src.core.config import RunConfig
from src.core.errors import ConfigError
from src.export import (
    export_chart,
    export_convergence,
    export_field,
    export_report,
    export_solution_csv,
    export_surface,
    load_chart,
    read_solution_csv,
    render_contours,
)
from src.export.writer import atomic_write
from src.inverse import legendre_transform_grid, recover_seeds
from src.potential import derive_joyce_data, dual_joyce, dual_potential, parse_potential
from src.seeds import Grid2, ScalarField, linear_residual, make_seed, parse_seed
from src.verify import (
    ResidualReport,
    XGrid,
    XGridSolution,
    chart_box,
    compact_bumps,
    convergence_study,
    convexity_legendre_check,
    euler_lagrange_residual,
    functional_and_first_variation,
    hessian_via_chain,
    flux_residual,
    resample_to_xgrid,
)

Box = Tuple[float, float, float, float]
# 49, 97, 193 at three levels
DEFAULT_XGRID = 49
# the worked dual is exact on its grids; finer levels only add round-off
DEFAULT_DUAL_XGRID = 17


@dataclass
class RunOutcome:
    command: str
    passed: bool
    files: List[Path] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)


def xgrid_levels(coarse: int, count: int) -> List[int]:
    """(n - 1) 2^k + 1 nodes per side, so every level contains the coarser nodes."""
    return [(coarse - 1) * 2**k + 1 for k in range(count)]


def inner_box(box: Box, fraction: float = 0.125) -> Box:
    """``box`` shrunk by ``fraction`` of its width on every side."""
    d1 = fraction * (box[1] - box[0])
    d2 = fraction * (box[3] - box[2])
    return (box[0] + d1, box[1] - d1, box[2] + d2, box[3] - d2)


class PipelineRunner:
    """
    Runs the construction, verification, converse, affine and duality
    pipelines for one configuration.
    """

    def __init__(self, config: RunConfig, input_path: Optional[str] = None, force: bool = False):
        self.config = config
        self.input_path = input_path
        self.force = force
        self.potential = parse_potential(config.potential)
        self.jd = derive_joyce_data(self.potential, config.joyce_mode)
        self.grid = Grid2.from_domain(config.domain, config.grid)
        self.out = Path(config.out)
        self.hash = config.config_hash()

    # -------------------------------------------------------------------------
    # Helpers
    # -------------------------------------------------------------------------

    def _wants(self, fmt: str) -> bool:
        return fmt in self.config.formats

    def _path(self, name: str) -> str:
        return str(self.out / name)

    def _start(self, command: str) -> List[Path]:
        logger.info(f"[Runner] {command}: potential {self.config.potential}, grid {self.grid.nH}x{self.grid.nr}, hash {self.hash}")
        return [atomic_write(self._path("config.txt"), self.config.to_file_text())]

    def _base(self) -> Optional[Tuple[int, int]]:
        if self.config.base is None:
            return None
        return self.grid.nearest(*self.config.base)

    def _tol(self, name: str) -> float:
        return self.config.tolerance(name)

    def _seeds(self) -> Tuple[ScalarField, ScalarField]:
        xi1 = make_seed(parse_seed(self.config.seed1), self.jd, self.grid)
        xi2 = make_seed(parse_seed(self.config.seed2), self.jd, self.grid)
        return xi1, xi2

    def _chart(self) -> Chart:
        if self.input_path and self.input_path.endswith(".json"):
            return load_chart(self.input_path, self.config.potential, self.config.joyce_mode, self.force).chart
        xi1, xi2 = self._seeds()
        return assemble_chart(xi1, xi2, self.jd, self._base(), self._tol("closedness"), potential=self.config.potential)

    def _external(self) -> Optional[XGridSolution]:
        if self.input_path and self.input_path.endswith(".csv"):
            return read_solution_csv(self.input_path)
        if self.input_path and not self.input_path.endswith(".json"):
            raise ConfigError(f"Unsupported input '{self.input_path}': expected a chart .json or a solution .csv")
        return None

    def _levels(self, default: int = DEFAULT_XGRID) -> List[int]:
        return xgrid_levels(self.config.xgrid or default, self.config.refine)

    def _study(self, producer: Callable[[int], ResidualReport], levels: List[int]) -> ResidualReport:
        tol = self._tol("residual")
        if len(levels) < 3:
            logger.warning(f"[Runner] {len(levels)} level(s): reporting single-level residuals without an order fit")
            return producer(levels[-1])
        return convergence_study(producer, levels, tol=tol, floor=1e-2 * tol)

    # -------------------------------------------------------------------------
    # seeds
    # -------------------------------------------------------------------------

    def run_seeds(self) -> RunOutcome:
        files = self._start("seeds")
        tol = self._tol("residual")
        checks: Dict[str, Any] = {}
        passed = True
        for label, xi in zip(("xi1", "xi2"), self._seeds()):
            n = linear_residual(xi, self.jd).interior_norms()
            ok = n.linf <= tol
            passed &= ok
            checks[label] = {"spec": xi.name, "jet_source": xi.jet_source.value, "residual_linf": n.linf, "residual_l2": n.l2, "passed": ok}
            if self._wants("json"):
                files.append(export_field(xi, self._path(f"seed-{label}.json"), self.hash, {"residual_linf": n.linf}))
            if self._wants("svg"):
                files.append(render_contours(xi, self._path(f"seed-{label}.svg"), self.hash))
        files.append(export_report(self._path("seeds-report.json"), "seeds", checks, self.hash, passed))
        return RunOutcome("seeds", passed, files, checks)

    # -------------------------------------------------------------------------
    # construct
    # -------------------------------------------------------------------------

    def construct(self) -> RunOutcome:
        files = self._start("construct")
        xi1, xi2 = self._seeds()
        chart = assemble_chart(xi1, xi2, self.jd, self._base(), self._tol("closedness"), potential=self.config.potential)
        identities = chart_identities(chart, self._tol("identity"))
        if self._wants("json"):
            files.append(export_chart(chart, self._path("chart.json"), self.hash, self.config.joyce_mode))
        if self._wants("svg"):
            for name in ("x1", "x2", "u"):
                files.append(render_contours(getattr(chart, name), self._path(f"chart-{name}.svg"), self.hash, title=name))
        checks = {"identities": identities, "gauge": chart.gauge.as_dict()}
        files.append(export_report(self._path("construct-report.json"), "construct", checks, self.hash, identities.passed))
        logger.info(f"[Runner] construct -> {'PASS' if identities.passed else 'FAIL'}")
        return RunOutcome("construct", identities.passed, files, {"identities": identities.model_dump()})

    # -------------------------------------------------------------------------
    # verify
    # -------------------------------------------------------------------------

    def verify(self) -> RunOutcome:
        files = self._start("verify")
        tol = self._tol("residual")
        external = self._external()
        checks: Dict[str, Any] = {}
        reports: List[ResidualReport] = []

        if external is not None:
            sol = external
            el = euler_lagrange_residual(sol, self.potential, tol)
            ob = flux_residual(sol, self.jd, tol, pot=self.potential)
            reports += [el, ob]
            checks["convexity"] = convexity_legendre_check(sol, self._tol("identity"), self._tol("identity_h2"))
            passed = el.passed and ob.passed and checks["convexity"].convex
        else:
            chart = self._chart()
            chain = hessian_via_chain(chart)
            checks["chain_hessian"] = {"symmetry_defect": chain.symmetry_defect, "det_defect": chain.det_defect}
            checks["chart_convexity"] = convexity_legendre_check(chart, self._tol("identity"), self._tol("identity_h2"))

            box = chart_box(chart)
            levels = self._levels()
            measured = inner_box(box)
            resampled: Dict[int, XGridSolution] = {}

            def solution(n: int) -> XGridSolution:
                if n not in resampled:
                    resampled[n] = resample_to_xgrid(chart, XGrid.from_box(box, n), tol=self._tol("newton"))
                return resampled[n]

            el = self._study(lambda n: euler_lagrange_residual(solution(n), self.potential, tol, measured), levels)
            ob = self._study(lambda n: flux_residual(solution(n), self.jd, tol, measured, pot=self.potential), levels)
            reports += [el, ob]
            sol = resampled[levels[-1]]
            checks["convexity"] = convexity_legendre_check(sol, self._tol("identity"), self._tol("identity_h2"))
            checks["first_variation"] = self._first_variation(sol)
            passed = el.passed and ob.passed and checks["chart_convexity"].passed and checks["convexity"].convex

        checks["affine_invariant"] = affine_invariant_check(sol, tol=tol)
        checks["residuals"] = [r.model_dump() for r in reports]
        if self._wants("csv"):
            files.append(export_convergence(reports, self._path("convergence.csv"), self.hash))
            files.append(export_solution_csv(sol, self._path("solution.csv"), self.hash))
        files.append(export_report(self._path("verify-report.json"), "verify", checks, self.hash, passed))
        logger.info(f"[Runner] verify -> {'PASS' if passed else 'FAIL'}")
        return RunOutcome("verify", passed, files, {"residuals": {r.name: r.model_dump() for r in reports}})

    def _first_variation(self, sol: XGridSolution, count: int = 3) -> Dict[str, float]:
        values = []
        for phi in compact_bumps(sol.grid, count):
            fv = functional_and_first_variation(sol, self.potential, phi, step=1e-4)
            values.append(abs(fv.derivative) / fv.phi_max)
            value = fv.value
        return {"functional": value, "max_relative_first_variation": float(max(values))}

    # -------------------------------------------------------------------------
    # invert
    # -------------------------------------------------------------------------

    def invert(self) -> RunOutcome:
        files = self._start("invert")
        tol = self._tol("residual")
        external = self._external()
        reference = None
        if external is not None:
            sol = external
        else:
            chart = self._chart()
            n = self._levels()[-1]
            sol = resample_to_xgrid(chart, XGrid.from_box(chart_box(chart), n), tol=self._tol("newton"))
            reference = (chart.xi1, chart.xi2)
        rec = recover_seeds(sol, self.jd, reference=reference, divergence_tol=self._tol("divergence"))
        if rec.gauge is not None:
            passed = rec.gauge.linf <= tol
        else:
            passed = max(rec.residual1, rec.residual2) <= tol
        checks: Dict[str, Any] = {
            "grid": list(rec.grid.shape),
            "domain": {"H": list(rec.grid.H_range), "r": list(rec.grid.r_range)},
            "linear_residual": {"xi1": rec.residual1, "xi2": rec.residual2},
            "conjugate_discrepancy": rec.conjugate_discrepancy,
            "gauge": None if rec.gauge is None else rec.gauge.as_dict(),
        }
        if self._wants("json"):
            for label, xi in (("xi1", rec.xi1), ("xi2", rec.xi2)):
                files.append(export_field(xi, self._path(f"recovered-{label}.json"), self.hash))
        if self._wants("svg"):
            files.append(render_contours(rec.xi1, self._path("recovered-xi1.svg"), self.hash))
            files.append(render_contours(rec.xi2, self._path("recovered-xi2.svg"), self.hash))
        files.append(export_report(self._path("invert-report.json"), "invert", checks, self.hash, passed))
        logger.info(f"[Runner] invert -> {'PASS' if passed else 'FAIL'}")
        return RunOutcome("invert", passed, files, checks)

    # -------------------------------------------------------------------------
    # affine
    # -------------------------------------------------------------------------

    def affine(self) -> RunOutcome:
        files = self._start("affine")
        F1 = harmonic_field(self.config.harmonic1, self.grid)
        F2 = harmonic_field(self.config.harmonic2, self.grid)
        report, route_a, route_b = equivalence_check(
            F1, F2, self._base(), tol=self._tol("residual"), harmonic_tol=self._tol("harmonic"),
        )
        if self._wants("obj"):
            files += list(export_surface(route_a, self._path("surface-chern-terng.obj"), self.hash))
            files += list(export_surface(route_b, self._path("surface-seeds.obj"), self.hash))
        checks = {
            "equivalence": report,
            "surfaces": {
                s.name: {"area": s.area, "discrepancy": s.discrepancy, "consistency": s.consistency, "degenerate": s.degenerate}
                for s in (route_a, route_b)
            },
        }
        files.append(export_report(self._path("affine-report.json"), "affine", checks, self.hash, report.passed))
        return RunOutcome("affine", report.passed, files, {"equivalence": report.model_dump()})

    # -------------------------------------------------------------------------
    # dual
    # -------------------------------------------------------------------------

    def dual(self) -> RunOutcome:
        files = self._start("dual")
        tol = self._tol("residual")
        chart = self._chart()
        dual_pot = dual_potential(self.potential)
        dual_jd = dual_joyce(self.jd)
        box = chart_box(chart)
        levels = self._levels(DEFAULT_DUAL_XGRID)
        # Fix the xi-box from the coarsest transform so all levels measure one region
        coarse = legendre_transform_grid(resample_to_xgrid(chart, XGrid.from_box(box, levels[0])))
        xi_box = coarse.grid.box
        measured = inner_box(xi_box)
        transforms: Dict[int, XGridSolution] = {}

        def transformed(n: int) -> XGridSolution:
            if n not in transforms:
                sol = resample_to_xgrid(chart, XGrid.from_box(box, n), tol=self._tol("newton"))
                transforms[n] = legendre_transform_grid(sol, target=XGrid.from_box(xi_box, n))
            return transforms[n]

        el = self._study(lambda n: euler_lagrange_residual(transformed(n), dual_pot, tol, measured), levels)
        ob = self._study(lambda n: flux_residual(transformed(n), dual_jd, tol, measured, pot=dual_pot), levels)
        star = transforms[levels[-1]]
        convexity = convexity_legendre_check(star, self._tol("identity"), self._tol("identity_h2"))
        passed = el.passed and ob.passed and convexity.convex
        checks = {"dual_potential": dual_pot.name, "residuals": [el.model_dump(), ob.model_dump()], "convexity": convexity}
        if self._wants("csv"):
            files.append(export_convergence([el, ob], self._path("dual-convergence.csv"), self.hash))
            files.append(export_solution_csv(star, self._path("dual-solution.csv"), self.hash))
        files.append(export_report(self._path("dual-report.json"), "dual", checks, self.hash, passed))
        logger.info(f"[Runner] dual -> {'PASS' if passed else 'FAIL'}")
        return RunOutcome("dual", passed, files, {"residuals": {el.name: el.model_dump(), ob.name: ob.model_dump()}})
