"""Classical zero-point field simulations of a bound charge."""

try:
    # installed wheel: extension lives inside the package
    from ._sedlab import *  # noqa: F401,F403
except ImportError:
    # build tree: extension sits on sys.path next to the package root
    from _sedlab import *  # noqa: F401,F403
