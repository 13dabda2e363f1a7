"""Recipe idea blending engine.

Thin re-export of the compiled module. Inside an installed package the
extension lives alongside this file; in a plain CMake build tree it sits on
sys.path by itself.
"""

try:
    from ._treeblend import *  # noqa: F401,F403
    from ._treeblend import __doc__  # noqa: F401
except ImportError:
    from _treeblend import *  # noqa: F401,F403
    from _treeblend import __doc__  # noqa: F401
