"""Planar geometric variational toolkit.

Builds Wulff bodies (direction-weighted perimeter minimizers), their dual
entropy-maximizing monotone curves, and verifies the predicted limit shape
of uniformly random Young diagrams against exact partition sampling.
"""

__version__ = "0.1.0"

from . import duality, geometry, maxshape, partitions, weights, wulff  # noqa: F401
