"""Numerical lab for homogeneous Alt-Phillips cones (C++ core)."""

from ._apcones import *  # noqa: F401,F403
from ._apcones import __version__  # noqa: F401
