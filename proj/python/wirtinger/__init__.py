"""Python bindings for the gradient-descent phase retrieval core."""

from ._wfcore import *  # noqa: F401,F403
from ._wfcore import __version__  # noqa: F401
