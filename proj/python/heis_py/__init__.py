"""Python bindings for the heis spectral library."""

from ._heis import *  # noqa: F401,F403
from ._heis import __version__  # noqa: F401
