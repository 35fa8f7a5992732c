"""Exact Bruhat-Tits tree computations for quasi-split p-adic unitary groups.

Builds the trees of hyperspecial (self-dual) Hermitian lattices for rank-2
and rank-3 unitary groups over Q_p (p inert in the quadratic extension),
the adjacency and distance-graded operators on formal sums of vertices, the
degree-6 Hecke polynomial with its quotient-ring factorization, a canonical
vertex family with its distribution relations, and norm-compatible families
built from roots of the specialized Hecke polynomial.
"""

from .errors import (
    AmbiguousProjection,
    FieldMismatch,
    HecketreeError,
    NoSolution,
    NonUnit,
    NonUniquePredecessor,
    NonUnitParameters,
    NotARoot,
    NotHyperspecial,
    PrecisionExhausted,
    RadiusExceeded,
    RankDeficient,
    UnsupportedSupport,
)
from .localring import LocalElement, LocalField, frobenius_conjugate, solve_trace_equation
from .lattices import (
    HermLattice,
    HermSpace,
    brute_force_neighbors,
    distance,
    embed_W_lattice,
    hyperspecial_neighbors,
    relative_invariants,
)

__version__ = "0.1.0"
