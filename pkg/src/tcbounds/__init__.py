"""Certified bounds for topological complexity and LS-category type invariants.

Layers:
  simplicial  finite complexes, skeleta, subdivision, complements, products
  homology    exact (co)homology over Z/2, Q, Z
  rings       cup products, tensor rings, cup-length, zero-divisor cup-length
  covers      finite-carrier cover extension and combination
  engine      citation-carrying interval propagation for the invariants
  cli         command-line front end
"""

from .descriptors import (
    AsphericalSpace,
    AttributeSet,
    EilenbergMacLane,
    GroupClass,
    ProductSpace,
    RealProjective,
    SkeletonSpace,
    Sphere,
    Torus,
)
from .engine import analyze, analyze_complex, report, seed_facts, propagate
from .errors import ConflictError, InternalInvariantError, InvalidInputError
from .intervals import INF, Interval
from .simplicial import SimplicialComplex, from_maximal_simplices

__version__ = "0.1.0"

__all__ = [
    "AsphericalSpace", "AttributeSet", "EilenbergMacLane", "GroupClass",
    "ProductSpace", "RealProjective", "SkeletonSpace", "Sphere", "Torus",
    "analyze", "analyze_complex", "report", "seed_facts", "propagate",
    "ConflictError", "InternalInvariantError", "InvalidInputError",
    "INF", "Interval", "SimplicialComplex", "from_maximal_simplices",
    "__version__",
]
