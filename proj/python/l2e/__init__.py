"""Plan-conditioned reinforcement learning with final-volume-preserving reward shaping."""

from ._l2e import *  # noqa: F401,F403
from ._l2e import __doc__  # noqa: F401
