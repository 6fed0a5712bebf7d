"""
joyce-pde - Generalized Joyce construction: seeds, charts, verification and duality.
"""
from src.__version__ import __version__, __version_info__

__all__ = ["__version__", "__version_info__"]
