"""Entropy-regularized inverse reinforcement learning on finite MDPs."""

from ._softirl import *  # noqa: F401,F403
from ._softirl import __doc__  # noqa: F401

__version__ = "0.1.0"
