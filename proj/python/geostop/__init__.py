"""Stopped multiple-return simulation and limit-law checks."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
