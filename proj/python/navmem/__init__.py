"""Spatial-semantic memory, retrieval and multi-goal route planning."""

try:
    from ._core import *  # noqa: F401,F403
    from ._core import __doc__  # noqa: F401
except ImportError:  # running against an in-tree build dir
    from _core import *  # noqa: F401,F403
