"""Duality structures on triangulated manifolds.

Subpackages are flat modules:

* :mod:`dualtri.complex`: simplicial and Delta-complexes
* :mod:`dualtri.metric`: Euclidean, weighted, Thurston and duality metrics
* :mod:`dualtri.geometry`: centers, signed distances, dual volumes
* :mod:`dualtri.regularity`: regularity tests, flips, the flip algorithm
* :mod:`dualtri.laplace`: Laplacian, Poisson, heat, entropy
* :mod:`dualtri.meshfile`, :mod:`dualtri.fixtures`, :mod:`dualtri.cli`
"""
from .complex import SimplicialComplex, build_complex, enumerate_hinges, vertex_star
from .errors import *  # noqa: F401,F403
from .fixtures import generate_fixture
from .geometry import compute_geometry, total_volume_check
from .laplace import assemble_laplacian, entropy_lambda, solve_poisson
from .meshfile import parse_mesh, write_mesh
from .metric import (
    DualityMetric,
    EuclideanMetric,
    ThurstonMetric,
    WeightedMetric,
    as_duality,
    as_weighted,
    duality_to_weighted,
    thurston_to_weighted,
    weighted_to_duality,
    weighted_to_thurston,
)
from .regularity import flip_edge, is_locally_regular, regularize

__version__ = "0.1.0"
