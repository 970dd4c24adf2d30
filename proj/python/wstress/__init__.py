"""Wasserstein reverse stress testing and sensitivity analysis."""

from ._core import *  # noqa: F401,F403
from ._core import NoSolution, NotConverged

__all__ = [name for name in dir() if not name.startswith("_")]
