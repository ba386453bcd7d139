"""Three-state reversible cellular automaton laboratory.

The heavy lifting lives in the compiled extension; this package re-exports
its surface. See the project README for the file formats and the CLI.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"
