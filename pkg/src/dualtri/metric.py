"""Metric structures over a complex and the conversions between them.

Four structures are supported:

* ``EuclideanMetric``: edge lengths.
* ``WeightedMetric``: edge lengths plus a real weight per vertex (squared
  radius of a vertex sphere, possibly negative).
* ``ThurstonMetric``: vertex weights plus a per-edge parameter ``c`` with
  induced length ``sqrt(w_a + w_b - c)``.
* ``DualityMetric``: a local length per directed edge.

Arrays are indexed by the complex's simplex ids. Directed quantities on an
edge ``e`` with stored endpoints ``(a, b)`` are kept as ``d[e, 0]`` (local
length at ``a``) and ``d[e, 1]`` (local length at ``b``).
"""
from collections import deque
from dataclasses import dataclass, field
from math import factorial

import numpy as np

from .errors import (
    InvalidStructure,
    LoopObstruction,
    MissingLength,
    MissingLocalLength,
    ValidationError,
)

__all__ = [
    "EuclideanMetric",
    "WeightedMetric",
    "ThurstonMetric",
    "DualityMetric",
    "ValidationReport",
    "CompatibilityReport",
    "cayley_menger_volume2",
    "validate_euclidean",
    "validate_metric",
    "check_compatibility",
    "weighted_to_thurston",
    "thurston_to_weighted",
    "weighted_to_duality",
    "duality_to_weighted",
    "loop_residuals",
    "as_duality",
    "as_weighted",
    "local_length_matrix",
    "edge_length_matrix",
]

# squared volume must exceed REL_VOLUME_TOL * (max edge)^(2k) for a k-simplex
REL_VOLUME_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class EuclideanMetric:
    complex: object
    lengths: np.ndarray
    kind = "euclidean"


@dataclass(frozen=True, eq=False)
class WeightedMetric:
    complex: object
    lengths: np.ndarray
    weights: np.ndarray
    kind = "weighted"


@dataclass(frozen=True, eq=False)
class ThurstonMetric:
    complex: object
    weights: np.ndarray
    c: np.ndarray
    kind = "thurston"

    @property
    def lengths(self):
        a, b = _endpoints(self.complex)
        return np.sqrt(self.weights[a] + self.weights[b] - self.c)


@dataclass(frozen=True, eq=False)
class DualityMetric:
    complex: object
    d: np.ndarray
    kind = "duality"

    @property
    def lengths(self):
        return self.d[:, 0] + self.d[:, 1]

    def local(self, t, p, q):
        """Local length at corner ``p`` of top simplex ``t`` toward ``q``."""
        e, fwd = self.complex.edge_at(t, p, q)
        return self.d[e, 0 if fwd else 1]


def _endpoints(cx):
    ev = np.array([cx.edge_vertices(e) for e in range(cx.num_edges)], dtype=int)
    return ev[:, 0], ev[:, 1]


def edge_length_matrix(cx, lengths, t):
    """Pairwise edge lengths between the corners of top simplex ``t``."""
    m = cx.n + 1
    out = np.zeros((m, m))
    for p in range(m):
        for q in range(p + 1, m):
            e, _ = cx.edge_at(t, p, q)
            out[p, q] = out[q, p] = lengths[e]
    return out


def local_length_matrix(metric, t):
    """``D[p, q]``: local length at corner ``p`` of ``t`` toward corner ``q``."""
    cx = metric.complex
    d = metric.d
    m = cx.n + 1
    out = np.zeros((m, m))
    for p in range(m):
        for q in range(m):
            if p != q:
                e, fwd = cx.edge_at(t, p, q)
                out[p, q] = d[e, 0 if fwd else 1]
    return out


def cayley_menger_volume2(lengths):
    """Squared volume of a simplex from its pairwise edge-length matrix.

    Parameters
    ----------
    lengths : (k+1, k+1) array
        Symmetric matrix of edge lengths.

    Returns
    -------
    float
        The Cayley-Menger squared volume; negative or zero values mean the
        lengths are not realized by a nondegenerate Euclidean simplex.
    """
    lengths = np.asarray(lengths, dtype=float)
    k = lengths.shape[0] - 1
    if k == 0:
        return 1.0
    cm = np.ones((k + 2, k + 2))
    cm[0, 0] = 0.0
    cm[1:, 1:] = lengths**2
    sign = (-1) ** (k + 1)
    return sign * np.linalg.det(cm) / (2**k * factorial(k) ** 2)


@dataclass
class ValidationReport:
    """Per-simplex squared volumes with their pass thresholds."""

    entries: list = field(default_factory=list)
    messages: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.messages and all(e[4] for e in self.entries)

    def failures(self):
        return [e for e in self.entries if not e[4]]


def validate_euclidean(cx, lengths, rel_tol=REL_VOLUME_TOL):
    """Check that every simplex of ``cx`` is a nondegenerate Euclidean simplex.

    Returns a :class:`ValidationReport` whose entries are
    ``(k, id, squared_volume, threshold, ok)`` for every simplex of dimension
    ``k >= 1``.

    Raises
    ------
    MissingLength
        If ``lengths`` does not provide a finite value for every edge.
    """
    lengths = np.asarray(lengths, dtype=float)
    if lengths.shape != (cx.num_edges,) or not np.all(np.isfinite(lengths)):
        raise MissingLength("lengths must give a finite value for each of the %d edges" % cx.num_edges)
    report = ValidationReport()
    for e in range(cx.num_edges):
        ok = lengths[e] > 0
        # keep the sign so that a negative length reads as degenerate
        report.entries.append((1, e, float(np.copysign(lengths[e] ** 2, lengths[e])), 0.0, bool(ok)))
    for k in range(2, cx.n + 1):
        for sid in range(cx.count(k)):
            t, corners = cx.occurrence(k, sid)
            full = edge_length_matrix(cx, lengths, t)
            sub = full[np.ix_(corners, corners)]
            vol2 = cayley_menger_volume2(sub)
            thresh = rel_tol * sub.max() ** (2 * k)
            report.entries.append((k, sid, vol2, thresh, bool(vol2 > thresh)))
    return report


@dataclass
class CompatibilityReport:
    residuals: np.ndarray
    tolerance: float

    @property
    def passed(self):
        return bool(np.all(np.abs(self.residuals) <= self.tolerance))

    @property
    def worst(self):
        return float(np.max(np.abs(self.residuals))) if self.residuals.size else 0.0


def check_compatibility(metric, tol=1e-10):
    """Per-triangle residual of the local-length compatibility condition.

    For a triangle with corners ``i, j, k`` in root order the residual is
    ``(d_ij^2 + d_jk^2 + d_ki^2) - (d_ji^2 + d_ik^2 + d_kj^2)``. The
    tolerance is relative to the squared maximum edge length.
    """
    cx = metric.complex
    d = np.asarray(metric.d, dtype=float)
    if d.shape != (cx.num_edges, 2) or not np.all(np.isfinite(d)):
        raise MissingLocalLength("local lengths must be a finite (%d, 2) array" % cx.num_edges)
    if cx.n < 2:
        return CompatibilityReport(np.zeros(0), tol)
    res = np.empty(cx.count(2))
    for sid in range(cx.count(2)):
        t, (i, j, k) = cx.occurrence(2, sid)
        loc = metric.local
        res[sid] = (loc(t, i, j) ** 2 + loc(t, j, k) ** 2 + loc(t, k, i) ** 2) - (
            loc(t, j, i) ** 2 + loc(t, i, k) ** 2 + loc(t, k, j) ** 2
        )
    scale = max(1.0, float(np.max(metric.lengths)) ** 2)
    return CompatibilityReport(res, tol * scale)


def validate_metric(metric, tol=1e-10):
    """Validate any metric structure against its own invariants.

    Raises :class:`ValidationError` describing the first violated invariant;
    returns the Euclidean :class:`ValidationReport` of the induced lengths
    otherwise.
    """
    cx = metric.complex
    if metric.kind == "thurston":
        a, b = _endpoints(cx)
        slack = metric.weights[a] + metric.weights[b] - metric.c
        bad = np.flatnonzero(~(slack > 0))
        if bad.size:
            raise ValidationError(
                "Thurston constraint c < w_a + w_b violated on edge %d" % bad[0],
                invariant="c_lt_wsum",
                simplex=(1, int(bad[0])),
            )
    if metric.kind == "duality":
        comp = check_compatibility(metric, tol)
        if not comp.passed:
            sid = int(np.argmax(np.abs(comp.residuals)))
            raise ValidationError(
                "compatibility residual %.3g on triangle %d" % (comp.residuals[sid], sid),
                invariant="compatibility",
                simplex=(2, sid),
            )
    if metric.kind == "weighted":
        w = np.asarray(metric.weights, dtype=float)
        if w.shape != (cx.num_vertices,) or not np.all(np.isfinite(w)):
            raise ValidationError("weights must give a finite value per vertex", invariant="weights")
    report = validate_euclidean(cx, metric.lengths)
    if not report.passed:
        k, sid, vol2, _, _ = report.failures()[0]
        raise ValidationError(
            "%d-simplex %d is not a nondegenerate Euclidean simplex (squared volume %.3g)"
            % (k, sid, vol2),
            invariant="euclidean",
            simplex=(k, sid),
        )
    return report


def weighted_to_thurston(m):
    """``c_ab = w_a + w_b - l_ab^2``; weights unchanged."""
    a, b = _endpoints(m.complex)
    w = np.asarray(m.weights, dtype=float)
    c = w[a] + w[b] - np.asarray(m.lengths, dtype=float) ** 2
    return ThurstonMetric(m.complex, w.copy(), c)


def thurston_to_weighted(m):
    a, b = _endpoints(m.complex)
    w = np.asarray(m.weights, dtype=float)
    slack = w[a] + w[b] - m.c
    if np.any(~(slack > 0)):
        e = int(np.flatnonzero(~(slack > 0))[0])
        raise InvalidStructure("c >= w_a + w_b on edge %d" % e, invariant="c_lt_wsum", simplex=(1, e))
    return WeightedMetric(m.complex, np.sqrt(slack), w.copy())


def weighted_to_duality(m):
    """Local lengths ``d_ab = (l^2 + w_a - w_b) / (2 l)`` on every edge."""
    a, b = _endpoints(m.complex)
    w = np.asarray(m.weights, dtype=float)
    ell = np.asarray(m.lengths, dtype=float)
    d = np.empty((len(ell), 2))
    d[:, 0] = (ell**2 + w[a] - w[b]) / (2 * ell)
    d[:, 1] = (ell**2 + w[b] - w[a]) / (2 * ell)
    return DualityMetric(m.complex, d)


def _spanning_tree(cx, base):
    """BFS tree over non-loop edges; returns parent map and visit order."""
    adj = [[] for _ in range(cx.num_vertices)]
    for e in range(cx.num_edges):
        a, b = cx.edge_vertices(e)
        if a != b:
            adj[a].append((b, e))
            adj[b].append((a, e))
    parent = {base: (None, None)}
    order = [base]
    queue = deque([base])
    while queue:
        v = queue.popleft()
        for u, e in adj[v]:
            if u not in parent:
                parent[u] = (v, e)
                order.append(u)
                queue.append(u)
    return parent, order


def _tree_path(parent, v):
    path = [v]
    while parent[v][0] is not None:
        v = parent[v][0]
        path.append(v)
    return path


def loop_residuals(metric, base_vertex=None, w0=0.0):
    """Propagate weights over a spanning tree and measure loop closure.

    Parameters
    ----------
    metric : DualityMetric
    base_vertex : int, optional
        Vertex *label* whose weight is pinned to ``w0``; defaults to the
        vertex with id 0.
    w0 : float

    Returns
    -------
    weights : ndarray
    residuals : dict
        ``{edge_id: d_ba^2 - d_ab^2 + w_a - w_b}`` for each non-tree edge.
    parent : dict
        Spanning-tree parent links ``{vertex: (parent_vertex, edge)}``.
    """
    cx = metric.complex
    d = metric.d
    base = 0 if base_vertex is None else cx.vertex_of(base_vertex)
    parent, order = _spanning_tree(cx, base)
    if len(order) != cx.num_vertices:
        raise ValidationError("complex is not connected", invariant="connected")
    w = np.empty(cx.num_vertices)
    w[base] = w0
    for v in order[1:]:
        u, e = parent[v]
        a, b = cx.edge_vertices(e)
        # w_b = d_ba^2 - d_ab^2 + w_a
        if a == u:
            w[v] = d[e, 1] ** 2 - d[e, 0] ** 2 + w[u]
        else:
            w[v] = d[e, 0] ** 2 - d[e, 1] ** 2 + w[u]
    tree_edges = {e for (_, e) in parent.values() if e is not None}
    residuals = {}
    for e in range(cx.num_edges):
        if e in tree_edges:
            continue
        a, b = cx.edge_vertices(e)
        residuals[e] = d[e, 1] ** 2 - d[e, 0] ** 2 + w[a] - w[b]
    return w, residuals, parent


def duality_to_weighted(metric, base_vertex=None, w0=0.0, tol=1e-10):
    """Recover vertex weights from local lengths.

    Weights are fixed up to one additive constant, pinned by
    ``w(base_vertex) = w0``.

    Raises
    ------
    LoopObstruction
        When some loop's weight differences fail to close; carries the worst
        cycle and its residual. The tolerance is relative to the squared
        maximum edge length.
    """
    cx = metric.complex
    w, residuals, parent = loop_residuals(metric, base_vertex, w0)
    ell = metric.lengths
    scale = max(1.0, float(np.max(ell)) ** 2)
    if residuals:
        worst = max(residuals, key=lambda e: (abs(residuals[e]), -e))
        r = abs(residuals[worst])
        if r > tol * scale:
            a, b = cx.edge_vertices(worst)
            pa, pb = _tree_path(parent, a), _tree_path(parent, b)
            common = set(pa) & set(pb)
            lca = next(v for v in pa if v in common)
            up = pa[: pa.index(lca) + 1]
            down = pb[: pb.index(lca)][::-1]
            # a -> ... -> lca -> ... -> b, closed by the edge back to a
            cycle = up + down + [a]
            raise LoopObstruction(r, worst, cycle, residuals)
    return WeightedMetric(cx, ell.copy(), w)


def as_weighted(metric, base_vertex=None, w0=0.0, tol=1e-10):
    if metric.kind == "weighted":
        return metric
    if metric.kind == "euclidean":
        return WeightedMetric(metric.complex, metric.lengths, np.zeros(metric.complex.num_vertices))
    if metric.kind == "thurston":
        return thurston_to_weighted(metric)
    return duality_to_weighted(metric, base_vertex, w0, tol)


def as_duality(metric):
    """Local lengths for any metric structure (zero weights for Euclidean)."""
    if metric.kind == "duality":
        return metric
    return weighted_to_duality(as_weighted(metric))
