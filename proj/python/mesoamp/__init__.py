"""Master-equation simulator and power optimizer for mesoscopic transistor
voltage amplifiers. All heavy lifting lives in the compiled _core module."""

try:
    from ._core import *  # noqa: F401,F403
    from ._core import __version__  # noqa: F401
except ImportError:  # development layout: _core on sys.path next to the build tree
    from _core import *  # noqa: F401,F403
    from _core import __version__  # noqa: F401
