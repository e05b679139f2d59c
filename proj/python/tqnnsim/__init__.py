"""Desk-scale simulator of topological quantum neural networks.

BF-theory transition amplitudes between spin-network boundary states,
time-sliced path integrals, and the amplitude classifier built on them.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
