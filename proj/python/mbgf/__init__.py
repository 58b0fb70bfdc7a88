"""Python facade for the mbgf workbench.

The compiled extension sits inside this package when installed, or on
sys.path next to it when running from a build tree.
"""

try:
    from ._mbgf import *  # noqa: F401,F403
    from ._mbgf import __version__  # noqa: F401
except ImportError:
    from _mbgf import *  # noqa: F401,F403
    from _mbgf import __version__  # noqa: F401
