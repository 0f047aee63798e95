"""Beckner constants, transport distances and curvature for detailed-balance Lindbladians."""

from ._core import *  # noqa: F401,F403
from ._core import Error, Lindbladian, JumpTerm

__all__ = [name for name in dir() if not name.startswith("_")]
