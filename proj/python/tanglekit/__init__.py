"""Pangenome-guided genome reconstruction via binary optimisation.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from tanglekit._core import *  # noqa: F401,F403
from tanglekit._core import __version__  # noqa: F401
