"""Surrogate-assisted estimation with prediction-powered corrections."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
