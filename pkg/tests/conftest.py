import numpy as np
import pytest

from dualtri.complex import build_complex
from dualtri.geometry import HingeEmbedding
from dualtri.metric import EuclideanMetric, WeightedMetric


def metric_from_points(tops, points, weights=None):
    """Euclidean (or weighted) metric whose labels index ``points``."""
    cx = build_complex(tops)
    lengths = np.array(
        [np.linalg.norm(np.subtract(points[a], points[b])) for a, b in cx.roots[1]]
    )
    if weights is None:
        return EuclideanMetric(cx, lengths)
    w = np.array([weights[cx.vertex_label(v)] for v in range(cx.num_vertices)])
    return WeightedMetric(cx, lengths, w)


def local_matrix(pts, ws):
    D = np.zeros((len(pts), len(pts)))
    for a in range(len(pts)):
        for b in range(len(pts)):
            if a != b:
                ell = np.linalg.norm(pts[a] - pts[b])
                D[a, b] = (ell**2 + ws[a] - ws[b]) / (2 * ell)
    return D


def planar_hinge(P, w=None):
    """Hinge embedding of planar points i, j (shared edge), k, l."""
    P = np.asarray(P, dtype=float)
    w = np.zeros(4) if w is None else np.asarray(w, dtype=float)
    i, j, k, l = P
    ell = np.linalg.norm(i - j)
    return HingeEmbedding.from_lengths(
        np.array([[0.0, ell], [ell, 0.0]]),
        [np.linalg.norm(i - k), np.linalg.norm(j - k)],
        [np.linalg.norm(i - l), np.linalg.norm(j - l)],
        local_matrix(P[[0, 1, 2]], w[[0, 1, 2]]),
        local_matrix(P[[0, 1, 3]], w[[0, 1, 3]]),
    )


def random_planar_hinge(rng, weight=0.05, min_height=0.05):
    P = np.array(
        [
            (0.0, 0.0),
            (1.0, 0.0),
            (rng.uniform(-0.5, 1.5), rng.uniform(min_height, 1.0)),
            (rng.uniform(-0.5, 1.5), -rng.uniform(min_height, 1.0)),
        ]
    )
    w = rng.uniform(-weight, weight, 4)
    return P, w, planar_hinge(P, w)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.REPORT:
        terminalreporter.section("acceptance")
        for line in mod.REPORT:
            terminalreporter.write_line(line)
