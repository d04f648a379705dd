"""Deterministic fixture meshes.

=====================  ===========================================
name                   parameters
=====================  ===========================================
flat_torus_grid        ``k`` (>= 3): k x k grid on the unit torus
tetrahedron_boundary   unit edges
icosahedron_boundary   unit edges
thin_hinge             a non-regular, flippable hinge
square_hinge           unit square split along a diagonal
paper_torus            ``eps``: one-vertex torus with local lengths
random_surface         ``v``, ``weight_spread``, ``flips``,
                       ``edge_positive``
sphere_packing_s3      ``r_min``, ``r_max``: 16-cell boundary
=====================  ===========================================
"""
import itertools

import numpy as np
from scipy.spatial import ConvexHull

from .complex import build_complex
from .errors import UnknownFixture
from .meshfile import MeshDocument
from .metric import DualityMetric, EuclideanMetric, WeightedMetric

__all__ = ["FIXTURES", "generate_fixture", "euclidean_from_points"]


def euclidean_from_points(tops, points):
    """Euclidean metric of a complex whose labels index ``points``."""
    cx = build_complex(tops)
    lengths = np.array(
        [
            np.linalg.norm(np.subtract(points[a], points[b]))
            for a, b in (cx.roots[1][e] for e in range(cx.num_edges))
        ]
    )
    return EuclideanMetric(cx, lengths)


def flat_torus_grid(k=4, seed=0):
    if k < 3:
        raise ValueError("flat_torus_grid needs k >= 3")

    def lab(i, j):
        return (i % k) * k + (j % k) + 1

    tops = []
    for i in range(k):
        for j in range(k):
            tops.append((lab(i, j), lab(i + 1, j), lab(i + 1, j + 1)))
            tops.append((lab(i, j), lab(i + 1, j + 1), lab(i, j + 1)))
    cx = build_complex(tops)
    h = 1.0 / k
    lengths = np.empty(cx.num_edges)
    for e, (a, b) in enumerate(cx.roots[1]):
        da = divmod(a - 1, k)
        db = divmod(b - 1, k)
        steps = sum(min((x - y) % k, (y - x) % k) for x, y in zip(da, db))
        lengths[e] = h * np.sqrt(steps)
    return MeshDocument(cx, EuclideanMetric(cx, lengths))


def tetrahedron_boundary(seed=0):
    cx = build_complex(list(itertools.combinations(range(1, 5), 3)))
    return MeshDocument(cx, EuclideanMetric(cx, np.ones(cx.num_edges)))


def icosahedron_boundary(seed=0):
    g = (1 + np.sqrt(5)) / 2
    pts = []
    for s1 in (-1, 1):
        for s2 in (-1, 1):
            pts += [(0, s1, s2 * g), (s1, s2 * g, 0), (s2 * g, 0, s1)]
    pts = np.array(pts, dtype=float) / 2.0  # edge length 1
    hull = ConvexHull(pts)
    points = {i + 1: p for i, p in enumerate(pts)}
    return _doc(euclidean_from_points([tuple(s + 1) for s in hull.simplices], points))


def _doc(metric):
    return MeshDocument(metric.complex, metric)


def thin_hinge(seed=0):
    points = {1: (0.0, 0.0), 2: (1.0, 0.0), 3: (0.5, 0.1), 4: (0.5, -0.1)}
    return _doc(euclidean_from_points([(1, 2, 3), (1, 2, 4)], points))


def square_hinge(seed=0):
    points = {1: (0.0, 0.0), 2: (1.0, 0.0), 3: (1.0, 1.0), 4: (0.0, 1.0)}
    return _doc(euclidean_from_points([(1, 2, 3), (1, 3, 4)], points))


def paper_torus(eps=0.1, seed=0):
    """Two triangles glued into a torus with a single vertex.

    Edges (1,2) and (1,3) carry local lengths ``eps`` and ``1 - eps``, edge
    (1,4) is split evenly; all edge lengths are 1. Every triangle is
    compatible but the weight differences do not close up around the loops
    through the first two edges.
    """
    cx = build_complex([(1, 2, 3), (1, 2, 4)], gluings=[((1, 3), (4, 2)), ((3, 2), (1, 4))])
    d = np.empty((cx.num_edges, 2))
    for e, root in enumerate(cx.roots[1]):
        d[e] = (0.5, 0.5) if root == (1, 4) else (eps, 1 - eps)
    return MeshDocument(cx, DualityMetric(cx, d))


def _random_flips(metric, count, rng):
    from .regularity import FlipMesh, _flippable

    mesh = FlipMesh(metric)
    done = 0
    for _ in range(20 * count):
        if done >= count:
            break
        edges = mesh.interior_edges()
        e = edges[rng.integers(len(edges))]
        try:
            emb = mesh.embed(e)
        except Exception:
            continue
        if not _flippable(emb, 1e-3):
            continue
        # keep triangles reasonably shaped
        new = np.sqrt(((emb.coords[2] - emb.coords[3]) ** 2).sum())
        if new > 2.5 * emb.coords[1, 0]:
            continue
        mesh.flip(e)
        done += 1
    dm = mesh.to_metric()
    return EuclideanMetric(dm.complex, dm.lengths)


def random_surface(v=20, weight_spread=0.0, flips=None, edge_positive=True, seed=0):
    """Convex hull of random points on the unit sphere, then random flips.

    Weights are drawn uniformly from ``weight_spread * [-1, 1] * mean(l)^2``
    and halved until the structure is edge positive (when requested).
    """
    from .metric import weighted_to_duality
    from .regularity import is_edge_positive

    if v < 4:
        raise ValueError("random_surface needs at least 4 vertices")
    rng = np.random.default_rng(seed)
    while True:
        pts = rng.standard_normal((v, 3))
        pts /= np.linalg.norm(pts, axis=1)[:, None]
        hull = ConvexHull(pts)
        if len(hull.vertices) == v:
            break
    points = {i + 1: p for i, p in enumerate(pts)}
    base = euclidean_from_points([tuple(s + 1) for s in hull.simplices], points)
    if flips is None:
        flips = v // 2
    if flips:
        base = _random_flips(base, flips, rng)
    cx = base.complex
    scale = float(np.mean(base.lengths) ** 2)
    w = rng.uniform(-1, 1, cx.num_vertices) * weight_spread * scale
    for _ in range(60):
        wm = WeightedMetric(cx, base.lengths, w)
        if not edge_positive or is_edge_positive(weighted_to_duality(wm))[0]:
            break
        w = 0.5 * w
    else:
        wm = WeightedMetric(cx, base.lengths, np.zeros(cx.num_vertices))
    return MeshDocument(cx, wm)


def sphere_packing_s3(r_min=1.0, r_max=2.0, seed=0):
    """Boundary of the 16-cell with tangent vertex balls of random radii.

    Labels ``2i+1`` and ``2i+2`` are the vertices ``+e_i`` and ``-e_i``.
    Each edge has length ``r_a + r_b`` and local lengths ``d_ab = r_a``.
    """
    rng = np.random.default_rng(seed)
    tops = [tuple(2 * i + 1 + s[i] for i in range(4)) for s in itertools.product((0, 1), repeat=4)]
    cx = build_complex(tops)
    r = rng.uniform(r_min, r_max, cx.num_vertices)
    d = np.array([(r[a], r[b]) for a, b in (cx.edge_vertices(e) for e in range(cx.num_edges))])
    return MeshDocument(cx, DualityMetric(cx, d))


FIXTURES = {
    "flat_torus_grid": flat_torus_grid,
    "tetrahedron_boundary": tetrahedron_boundary,
    "icosahedron_boundary": icosahedron_boundary,
    "thin_hinge": thin_hinge,
    "square_hinge": square_hinge,
    "paper_torus": paper_torus,
    "random_surface": random_surface,
    "sphere_packing_s3": sphere_packing_s3,
}


def generate_fixture(name, params=None, seed=0):
    """Build fixture ``name`` with keyword ``params``.

    Raises
    ------
    UnknownFixture
    """
    try:
        fn = FIXTURES[name]
    except KeyError:
        raise UnknownFixture("unknown fixture %r (known: %s)" % (name, ", ".join(sorted(FIXTURES)))) from None
    return fn(seed=seed, **(params or {}))
