"""Expanding random walks, lattices and self-affine fractals."""

from ._expwalk import *  # noqa: F401,F403
from ._expwalk import Error, DomainError, ConditioningError, ConvergenceError  # noqa: F401
