"""Equivariant vector fields, relative equilibria, and bifurcation tools.

The library realizes, over a fixed catalog of compact-group actions, the
calculus of equivariant vector fields up to gauge isomorphism: the slice
decomposition into transversal and orbit-tangent parts, relative-equilibrium
motion and frequency stabilization, flow reconstruction from a gauge
transformation, and continuation of bifurcating branches of relative
equilibria.
"""

__version__ = "0.1.0"

from . import errors
from .groups import (
    AlgebraSplitting,
    GroupModel,
    LatticeBasis,
    adjoint,
    circle_group,
    exp_group,
    lattice_basis,
    make_splitting,
    o2_group,
    rational_rank,
    rxs1_group,
    so3_group,
    torus_group,
)

__all__ = [
    "errors",
    "AlgebraSplitting",
    "GroupModel",
    "LatticeBasis",
    "adjoint",
    "circle_group",
    "exp_group",
    "lattice_basis",
    "make_splitting",
    "o2_group",
    "rational_rank",
    "rxs1_group",
    "so3_group",
    "torus_group",
]
