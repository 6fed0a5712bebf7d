import math
import tempfile
import unittest
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from loguru import logger

from src.affine import HarmonicTriple, chern_terng_integrate, harmonic_field
from src.construct import assemble_chart
from src.core.errors import ConfigError, GridMismatchError, HashMismatchError
from src.export import (
    atomic_write,
    contours_svg,
    export_chart,
    export_convergence,
    export_field,
    export_report,
    export_solution_csv,
    export_surface,
    format_number,
    load_chart,
    load_field,
    read_convergence,
    read_json,
    read_obj,
    read_solution_csv,
    render_contours,
    to_json_text,
)
from src.potential import derive_joyce_data, logdet
from src.seeds import Grid2, make_seed, parse_seed
from src.verify import ResidualReport, XGrid, closed_form_solution

LOGDET = derive_joyce_data(logdet())
HASH = "0123456789abcdef"


def worked_chart(n=33):
    grid = Grid2.from_domain((0.0, 1.0, 1.0, 2.0), (n, n))
    xi1, xi2 = make_seed(parse_seed("H"), LOGDET, grid), make_seed(parse_seed("logr"), LOGDET, grid)
    return assemble_chart(xi1, xi2, LOGDET, potential="logdet")


def test_format_number():
    assert format_number(1) == "1.0"
    assert format_number(0.1) == "0.10000000000000001"
    assert float(format_number(1.0 / 3.0)) == 1.0 / 3.0
    assert format_number(float("nan")) == "null"


def test_json_text_is_canonical():
    payload = {"b": 1, "a": [1.5, 2], "nested": {"ok": True, "none": None}}
    text = to_json_text(payload)
    assert text == to_json_text(dict(payload))
    assert text.index('"b"') < text.index('"a"')
    assert text.endswith("\n")


def test_atomic_write_leaves_no_temp_files(tmp_path):
    out = atomic_write(str(tmp_path / "deep" / "file.txt"), "hello\n")
    assert out.read_text() == "hello\n"
    assert [p.name for p in out.parent.iterdir()] == ["file.txt"]


class TestChartFiles(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.chart = worked_chart()

    def test_round_trip(self):
        logger.info("Testing the chart file round trip...")
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "chart.json"
            export_chart(self.chart, str(path), HASH)
            data = read_json(str(path))
            self.assertEqual(data["schema"], "chart/1")
            self.assertEqual(len(data["nodes"]), 33 * 33)
            self.assertEqual(data["config_hash"], HASH)

            loaded = load_chart(str(path))
            chart = loaded.chart
            self.assertEqual(loaded.config_hash, HASH)
            self.assertEqual(chart.grid, self.chart.grid)
            np.testing.assert_array_equal(chart.x1.values, self.chart.x1.values)
            np.testing.assert_array_equal(chart.u.values, self.chart.u.values)
            # the named seeds come back with their closed forms
            self.assertIsNotNone(chart.xi1.closed_form)
            np.testing.assert_allclose(chart.J, self.chart.J, rtol=1e-14)
        logger.success("Chart survives export and reload.")

    def test_export_is_deterministic(self):
        with tempfile.TemporaryDirectory() as tmp:
            first, second = Path(tmp) / "a.json", Path(tmp) / "b.json"
            export_chart(self.chart, str(first), HASH)
            export_chart(self.chart, str(second), HASH)
            self.assertEqual(first.read_bytes(), second.read_bytes())

    def test_potential_mismatch(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "chart.json"
            export_chart(self.chart, str(path), HASH)
            with self.assertRaises(HashMismatchError):
                load_chart(str(path), potential="power:0.25")
            self.assertEqual(load_chart(str(path), potential="logdet").potential, "logdet")
            forced = load_chart(str(path), potential="power:0.25", force=True)
            self.assertEqual(forced.potential, "power:0.25")

    def test_wrong_schema(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "other.json"
            path.write_text('{"schema": "field/1"}')
            with self.assertRaises(ConfigError):
                load_chart(str(path))


def test_field_round_trip(tmp_path):
    grid = Grid2.from_domain((0.0, 1.0, 1.0, 2.0), (9, 5))
    xi = make_seed(parse_seed("logr"), LOGDET, grid)
    path = export_field(xi, str(tmp_path / "xi.json"), HASH)
    loaded = load_field(str(path))
    assert loaded.grid == grid
    np.testing.assert_array_equal(loaded.values, xi.values)
    assert loaded.name == "logr"


def test_report_serializes_models(tmp_path):
    report = ResidualReport(name="el", grids=[(9, 9)], h=[0.25], linf=[1e-3], l2=[1e-4], tolerance=1e-2, passed=True)
    path = export_report(str(tmp_path / "report.json"), "verify", {"residuals": [report]}, HASH, passed=True)
    data = read_json(str(path))
    assert data["passed"] is True
    assert data["checks"]["residuals"][0]["name"] == "el"
    assert data["checks"]["residuals"][0]["grids"] == [[9, 9]]


def test_convergence_table(tmp_path):
    report = ResidualReport(
        name="euler-lagrange", grids=[(17, 17), (33, 33), (65, 65)], h=[1 / 16, 1 / 32, 1 / 64],
        linf=[4e-3, 1e-3, 2.5e-4], l2=[1e-3, 2.5e-4, 6.25e-5], order=2.0, tolerance=1e-2, passed=True,
    )
    path = export_convergence([report], str(tmp_path / "convergence.csv"), HASH)
    assert path.read_text().startswith(f"# schema=convergence/1 config_hash={HASH}")
    frame = read_convergence(str(path))
    assert list(frame["level"]) == [0, 1, 2]
    assert list(frame["n1"]) == [17, 33, 65]
    assert frame["linf"].iloc[2] == 2.5e-4
    assert frame["order"].iloc[0] == 2.0


class TestSolutionCsv(unittest.TestCase):
    def test_round_trip_in_any_row_order(self):
        sol = closed_form_solution(XGrid.from_box((0.0, 1.0, 1.0, 2.0), 9, 5), lambda a, b: a**2 + a * b, name="q")
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "u.csv"
            export_solution_csv(sol, str(path), HASH)
            self.assertEqual(path.read_text().splitlines()[0], f"# schema=solution/1 config_hash={HASH}")
            frame = pd.read_csv(path, comment="#").sample(frac=1.0, random_state=3)
            frame.to_csv(path, index=False, float_format="%.17g")
            back = read_solution_csv(str(path))
            self.assertEqual(back.grid.shape, (9, 5))
            np.testing.assert_array_equal(back.u, sol.u)
            self.assertEqual(back.name, "u")

    def test_bad_files(self):
        with tempfile.TemporaryDirectory() as tmp:
            missing = Path(tmp) / "missing.csv"
            with self.assertRaises(ConfigError):
                read_solution_csv(str(missing))

            columns = Path(tmp) / "columns.csv"
            pd.DataFrame({"x": [0.0], "y": [0.0], "u": [0.0]}).to_csv(columns, index=False)
            with self.assertRaises(ConfigError):
                read_solution_csv(str(columns))

            ragged = Path(tmp) / "ragged.csv"
            pd.DataFrame({"x1": [0.0, 0.0, 1.0], "x2": [0.0, 1.0, 0.0], "u": [0.0, 1.0, 2.0]}).to_csv(ragged, index=False)
            with self.assertRaises(GridMismatchError):
                read_solution_csv(str(ragged))

            small = Path(tmp) / "small.csv"
            X1, X2 = np.meshgrid([0.0, 0.5, 1.0], [0.0, 1.0], indexing="ij")
            pd.DataFrame({"x1": X1.ravel(), "x2": X2.ravel(), "u": 0.0}).to_csv(small, index=False)
            with self.assertRaises(GridMismatchError):
                read_solution_csv(str(small))

            uneven = Path(tmp) / "uneven.csv"
            X1, X2 = np.meshgrid([0.0, 0.1, 1.0], [0.0, 1.0, 2.0], indexing="ij")
            pd.DataFrame({"x1": X1.ravel(), "x2": X2.ravel(), "u": 0.0}).to_csv(uneven, index=False)
            with self.assertRaises(GridMismatchError):
                read_solution_csv(str(uneven))


def test_surface_obj(tmp_path):
    grid = Grid2.from_domain((0.0, 1.0, 1.0, 2.0), (17, 17))
    surface = chern_terng_integrate(HarmonicTriple.build(*(harmonic_field(n, grid) for n in ("l1", "l2", "const"))))
    obj, sidecar = export_surface(surface, str(tmp_path / "surface.obj"), HASH)
    vertices, faces = read_obj(str(obj))
    assert vertices.shape == (289, 3)
    assert faces.shape == (256, 4)
    assert faces.min() == 0 and faces.max() == 288
    np.testing.assert_array_equal(vertices, surface.vertices)
    meta = read_json(str(sidecar))
    assert meta["vertices"] == 289 and meta["faces"] == 256
    assert meta["degenerate"] is False
    assert meta["warnings"] == []


def test_degenerate_surface_is_exported_with_warning(tmp_path):
    grid = Grid2.from_domain((0.0, 1.0, 1.0, 2.0), (5, 5))
    surface = chern_terng_integrate(HarmonicTriple.build(*(harmonic_field("const", grid) for _ in range(3))))
    _, sidecar = export_surface(surface, str(tmp_path / "flat.obj"), HASH)
    meta = read_json(str(sidecar))
    assert meta["degenerate"] is True
    assert len(meta["warnings"]) == 1


class TestContours(unittest.TestCase):
    def test_svg_is_well_formed(self):
        H, R = np.meshgrid(np.linspace(0, 1, 33), np.linspace(1, 2, 33), indexing="ij")
        svg = contours_svg(H**2 + R**2, (0.0, 1.0), (1.0, 2.0), title="u <H, r>", config_hash=HASH)
        root = ET.fromstring(svg)
        polylines = root.findall("{http://www.w3.org/2000/svg}polyline")
        self.assertGreater(len(polylines), 0)
        levels = sorted({float(p.get("data-level")) for p in polylines})
        self.assertTrue(all(math.isfinite(v) for v in levels))
        self.assertIn("u &lt;H, r&gt;", svg)

    def test_constant_field(self):
        svg = contours_svg(np.full((9, 9), 2.5), (0.0, 1.0), (1.0, 2.0))
        root = ET.fromstring(svg)
        self.assertEqual(root.findall("{http://www.w3.org/2000/svg}polyline"), [])
        self.assertIn("constant field", svg)


@pytest.mark.parametrize("seed", ["H", "logr"])
def test_render_contours_writes_file(tmp_path, seed):
    grid = Grid2.from_domain((0.0, 1.0, 1.0, 2.0), (17, 17))
    out = render_contours(make_seed(parse_seed(seed), LOGDET, grid), str(tmp_path / f"{seed}.svg"), HASH)
    assert out.read_text().startswith("<svg")
    ET.parse(str(out))
