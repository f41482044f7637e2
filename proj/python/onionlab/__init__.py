"""Convex hull peeling in the ball and its parabolic scaling limit."""

from ._onionlab import *  # noqa: F401,F403
from ._onionlab import __version__  # noqa: F401
