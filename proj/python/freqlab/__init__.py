"""freqlab: Almgren-type frequency functions over exact and grid-backed fields.

The heavy lifting lives in the `_core` extension; this package re-exports
its public surface.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc

__all__ = [name for name in dir() if not name.startswith("_")]
