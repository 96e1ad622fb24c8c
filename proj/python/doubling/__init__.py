"""Expanding direction and rate of the period-doubling renormalization.

Thin wrapper over the compiled extension; everything user-facing lives in
``doubling._core``.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
