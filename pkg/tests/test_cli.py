"""
End-to-end runs of the command line through main(argv).
"""
import json
import tempfile
import unittest

import numpy as np
import pandas as pd
import pytest
from loguru import logger

from src.__main__ import build_config, build_parser, main

SMALL = ["--grid", "17x17"]


def _read(path):
    return json.loads(path.read_text())


def _solution_csv(path, u_fn, n=17, box=(-1.0, 1.0, -1.0, 1.0)):
    X1, X2 = np.meshgrid(np.linspace(box[0], box[1], n), np.linspace(box[2], box[3], n), indexing="ij")
    pd.DataFrame({"x1": X1.ravel(), "x2": X2.ravel(), "u": u_fn(X1, X2).ravel()}).to_csv(path, index=False, float_format="%.17g")
    return path


def test_construct_worked_example(tmp_path):
    logger.info("Running 'construct' on the worked example...")
    code = main(["construct", "--out", str(tmp_path), *SMALL, "--format", "json,svg"])
    assert code == 0
    report = _read(tmp_path / "construct-report.json")
    assert report["passed"] is True
    assert report["schema"] == "report/1"
    chart = _read(tmp_path / "chart.json")
    assert len(chart["nodes"]) == 17 * 17
    assert chart["config_hash"] == report["config_hash"]
    assert (tmp_path / "chart-u.svg").exists()
    assert "grid=17x17" in (tmp_path / "config.txt").read_text()
    assert (tmp_path / "config.txt").read_text().startswith(f"# schema=config/1 config_hash={report['config_hash']}\n")
    logger.success("construct wrote a consistent chart and report.")


def test_construct_dependent_seeds_fails_a_check(tmp_path):
    assert main(["construct", "--out", str(tmp_path), *SMALL, "--seed1", "H", "--seed2", "H"]) == 1


def test_seeds_command(tmp_path):
    assert main(["seeds", "--out", str(tmp_path), *SMALL]) == 0
    report = _read(tmp_path / "seeds-report.json")
    assert report["checks"]["xi1"]["spec"] == "H"
    assert (tmp_path / "seed-xi2.json").exists()


def test_seeds_non_solution_fails(tmp_path):
    assert main(["seeds", "--out", str(tmp_path), *SMALL, "--seed2", "expr:H2"]) == 1


def test_verify_external_solution(tmp_path):
    csv = _solution_csv(tmp_path / "paraboloid.csv", lambda a, b: 0.5 * (a**2 + b**2))
    out = tmp_path / "out"
    assert main(["verify", "--out", str(out), "--input", str(csv), "--format", "json,csv"]) == 0
    report = _read(out / "verify-report.json")
    assert report["passed"] is True
    assert report["checks"]["convexity"]["convex"] is True
    assert (out / "convergence.csv").exists()
    assert (out / "solution.csv").read_text().startswith(f"# schema=solution/1 config_hash={report['config_hash']}\n")


def test_verify_external_non_solution(tmp_path):
    csv = _solution_csv(tmp_path / "quartic.csv", lambda a, b: 0.5 * (a**2 + b**2) + 0.01 * a**4)
    assert main(["verify", "--out", str(tmp_path / "out"), "--input", str(csv)]) == 1


def test_verify_chart_input(tmp_path):
    assert main(["construct", "--out", str(tmp_path), *SMALL]) == 0
    assert main(["verify", "--out", str(tmp_path / "verify"), "--input", str(tmp_path / "chart.json"), "--refine", "3"]) == 0
    report = _read(tmp_path / "verify" / "verify-report.json")
    assert report["passed"] is True
    assert len(report["checks"]["residuals"]) == 2
    el = report["checks"]["residuals"][0]
    assert el["grids"] == [[49, 49], [97, 97], [193, 193]]
    assert el["order"] >= 1.9
    assert el["linf"][-1] <= 1e-4
    assert report["checks"]["chart_convexity"]["passed"] is True
    assert "first_variation" in report["checks"]


def test_affine_command(tmp_path):
    assert main(["affine", "--out", str(tmp_path), *SMALL, "--F1", "l1", "--F2", "l1^2-l2^2", "--format", "obj"]) == 0
    assert (tmp_path / "surface-chern-terng.obj").exists()
    assert (tmp_path / "surface-seeds.obj.json").exists()


def test_affine_non_harmonic_fails(tmp_path):
    assert main(["affine", "--out", str(tmp_path), *SMALL, "--F2", "l1^2"]) == 1


class TestInputErrors(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.out = self.tmp.name

    def tearDown(self):
        self.tmp.cleanup()

    def test_bad_grid(self):
        self.assertEqual(main(["construct", "--grid", "2x2"]), 2)

    def test_bad_tolerance_flag(self):
        self.assertEqual(main(["construct", "--tol", "residual"]), 2)

    def test_unknown_command(self):
        self.assertEqual(main(["frobnicate"]), 2)

    def test_missing_input(self):
        self.assertEqual(main(["invert", "--out", self.out, "--input", "does-not-exist.csv"]), 2)

    def test_unsupported_input(self):
        self.assertEqual(main(["verify", "--out", self.out, "--input", "solution.txt"]), 2)


def test_no_command_prints_help():
    assert main([]) == 0


def test_version():
    assert main(["version"]) == 0


def test_flags_override_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("potential=logdet\ngrid=33x33\ntol.residual=1e-3\n")
    args = build_parser().parse_args(["construct", "--config", str(cfg), "--grid", "9x9", "--tol", "newton=1e-10", "--F1", "l2"])
    config = build_config(args)
    assert config.grid == (9, 9)
    assert config.tolerance("residual") == 1e-3
    assert config.tolerance("newton") == 1e-10
    assert config.harmonic1 == "l2"


@pytest.mark.parametrize("fmt", ["json", "json,csv"])
def test_config_hash_is_stamped(tmp_path, fmt):
    assert main(["seeds", "--out", str(tmp_path), *SMALL, "--format", fmt]) == 0
    seed = _read(tmp_path / "seed-xi1.json")
    report = _read(tmp_path / "seeds-report.json")
    assert seed["config_hash"] == report["config_hash"]
