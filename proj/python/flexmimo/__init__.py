"""Flexible-position MIMO simulation and trajectory optimization toolkit."""

try:
    from ._flexmimo import *  # noqa: F401,F403  (installed wheel layout)
except ImportError:  # build-tree layout: extension on sys.path
    from _flexmimo import *  # noqa: F401,F403
