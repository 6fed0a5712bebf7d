"""
Version information for joyce-pde.

This file is automatically updated by the version management script.
"""

__version__ = "0.3.0"
__version_info__ = (0, 3, 0)

# Release notes
RELEASE_NOTES = {
    "0.3.0": "Converse direction, Legendre duality, affine maximal surfaces and the export/CLI layer.",
    "0.2.0": "Independent verification: chain-rule Hessian, resampling, residuals and convergence studies.",
    "0.1.0": "Initial release - Joyce data, seeds and chart assembly from closed 1-forms.",
}
