"""Embeddings, centers, signed distances and dual-cell volumes.

Every top simplex is embedded in its own frame: corner 0 at the origin,
corner 1 on the first axis, corner 2 in the first coordinate plane and so
on (the rows of a Cholesky factor of the Gram matrix). Centers of all faces
of a top simplex are computed in that frame. Quantities that are intrinsic
to a face (volumes, signed distances, barycentric coordinates of centers)
are therefore comparable across frames, which is how shared faces are
cross-checked.

Signed distances are measured from the affine span of a face ``S`` to the
center of ``S + {p}``, positive toward corner ``p``. Chain sums over flags
``S_0 < S_1 < ...`` of these distances give simplex volumes (flags ending at
the simplex) and signed dual volumes (flags starting at it).
"""
from collections import namedtuple
from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import Degenerate, DegenerateAngle, DegenerateHinge, LoopObstruction
from .metric import (
    as_duality,
    duality_to_weighted,
    edge_length_matrix,
    local_length_matrix,
)

__all__ = [
    "SimplexEmbedding",
    "HingeEmbedding",
    "Center",
    "DualGeometry",
    "VolumeReport",
    "embed_lengths",
    "embed_simplex",
    "embed_hinge",
    "compute_center",
    "center_from_local",
    "perpendicularity_residuals",
    "signed_distance",
    "center_offset_2d",
    "edge_offset",
    "barycentric",
    "compute_geometry",
    "simplex_volume",
    "dual_volume",
    "total_volume_check",
    "triangle_area",
]

Center = namedtuple("Center", ["point", "weight"])


@dataclass(frozen=True)
class SimplexEmbedding:
    """Coordinates of a k-simplex's corners in R^k."""

    simplex: object
    coords: np.ndarray
    orientation: int = 1

    def distances(self):
        diff = self.coords[:, None, :] - self.coords[None, :, :]
        return np.sqrt((diff**2).sum(-1))


def triangle_area(a, b, c):
    """Area from side lengths, accurate for needle-shaped triangles.

    Returns 0 for violated triangle inequalities instead of raising.
    """
    a, b, c = sorted((float(a), float(b), float(c)), reverse=True)
    prod = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))
    return 0.25 * np.sqrt(prod) if prod > 0 else 0.0


def _embed_triangle(lengths, tol):
    ell = lengths[0, 1]
    a, b = lengths[0, 2], lengths[1, 2]
    area = triangle_area(ell, a, b)
    if area <= tol * max(ell, a, b) ** 2:
        raise Degenerate("edge lengths give a (nearly) degenerate simplex")
    x = (a * a - b * b + ell * ell) / (2 * ell)
    return np.array([[0.0, 0.0], [ell, 0.0], [x, 2 * area / ell]])


def embed_lengths(lengths, tol=1e-12):
    """Realize a simplex from its edge-length matrix.

    Raises
    ------
    Degenerate
        If the Gram matrix is not positive definite within ``tol``.
    """
    lengths = np.asarray(lengths, dtype=float)
    k = lengths.shape[0] - 1
    coords = np.zeros((k + 1, k))
    if k == 0:
        return coords
    if k == 2:
        return _embed_triangle(lengths, tol)
    l0 = lengths[0, 1:] ** 2
    gram = 0.5 * (l0[:, None] + l0[None, :] - lengths[1:, 1:] ** 2)
    try:
        chol = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError:
        raise Degenerate("edge lengths do not span a nondegenerate simplex") from None
    scale = lengths.max()
    if np.min(np.diag(chol)) <= tol * scale:
        raise Degenerate("edge lengths give a (nearly) degenerate simplex")
    coords[1:] = chol
    return coords


def embed_simplex(metric, k, sid):
    """Embed k-simplex ``sid`` of the metric's complex in R^k."""
    cx = metric.complex
    t, corners = cx.occurrence(k, sid)
    full = edge_length_matrix(cx, metric.lengths, t)
    sub = full[np.ix_(corners, corners)]
    return SimplexEmbedding((k, sid), embed_lengths(sub))


@dataclass(frozen=True)
class HingeEmbedding:
    """Two top simplices sharing a face, embedded in one frame.

    Rows ``0..n-1`` of ``coords`` are the shared face's corners, row ``n``
    is the first apex (last coordinate > 0) and row ``n + 1`` the second
    apex (last coordinate < 0). The face rows are computed once, so they
    are bit-identical for both simplices.

    Attributes
    ----------
    coords : (n + 2, n) ndarray
    local1, local2 : (n + 1, n + 1) ndarray
        Local lengths of each top simplex, rows ordered face corners then
        apex.
    weights : (n + 2,) ndarray
        Vertex weights reconstructed from the local lengths in the gauge
        where face corner 0 has weight 0.
    hinge : Hinge or None
    """

    coords: np.ndarray
    local1: np.ndarray
    local2: np.ndarray
    weights: np.ndarray
    hinge: object = None

    @property
    def n(self):
        return self.coords.shape[1]

    def points(self, side):
        """Corner points of top simplex ``side`` (0 or 1), face first."""
        n = self.n
        return self.coords[list(range(n)) + [n + side]]

    def local(self, side):
        return self.local1 if side == 0 else self.local2

    @classmethod
    def from_lengths(cls, face_len, apex_len1, apex_len2, local1, local2, hinge=None, tol=1e-12):
        """Embed a hinge from its edge lengths and local lengths.

        Parameters
        ----------
        face_len : (n, n) array
            Edge lengths of the shared face.
        apex_len1, apex_len2 : (n,) array
            Distances from each apex to the face corners.
        local1, local2 : (n + 1, n + 1) array
            Local lengths, face corners first, apex last.
        """
        face_len = np.asarray(face_len, dtype=float)
        n = face_len.shape[0]
        if n == 2:
            return cls._from_lengths_2d(face_len[0, 1], apex_len1, apex_len2, local1, local2, hinge, tol)
        try:
            face = embed_lengths(face_len, tol)
        except Degenerate as exc:
            raise DegenerateHinge(str(exc)) from None
        coords = np.zeros((n + 2, n))
        coords[:n, : n - 1] = face
        scale = face_len.max() if n > 1 else max(np.max(apex_len1), np.max(apex_len2))
        for row, (apex, sign) in enumerate(((apex_len1, 1.0), (apex_len2, -1.0)), start=n):
            apex = np.asarray(apex, dtype=float)
            x = np.zeros(n - 1)
            if n > 1:
                rhs = 0.5 * (apex[0] ** 2 - apex[1:] ** 2 + (face[1:] ** 2).sum(1))
                x = np.linalg.solve(face[1:], rhs)
            h2 = apex[0] ** 2 - x @ x
            if h2 <= (tol * scale) ** 2:
                raise DegenerateHinge("apex lies in the span of the shared face")
            coords[row, : n - 1] = x
            coords[row, n - 1] = sign * np.sqrt(h2)
        local1 = np.asarray(local1, dtype=float)
        local2 = np.asarray(local2, dtype=float)
        w = np.zeros(n + 2)
        w[1 : n + 1] = local1[1:, 0] ** 2 - local1[0, 1:] ** 2
        w[n + 1] = local2[n, 0] ** 2 - local2[0, n] ** 2
        return cls(coords, local1, local2, w, hinge)

    @classmethod
    def _from_lengths_2d(cls, ell, apex1, apex2, local1, local2, hinge, tol):
        coords = np.zeros((4, 2))
        coords[1, 0] = ell
        for row, (a, b), sign in ((2, apex1, 1.0), (3, apex2, -1.0)):
            x = (a * a - b * b + ell * ell) / (2 * ell)
            h = 2 * triangle_area(ell, a, b) / ell
            if h <= tol * max(ell, a, b):
                raise DegenerateHinge("apex lies on the line of the shared edge")
            coords[row] = (x, sign * h)
        local1 = np.asarray(local1, dtype=float)
        local2 = np.asarray(local2, dtype=float)
        w = np.array(
            [
                0.0,
                local1[1, 0] ** 2 - local1[0, 1] ** 2,
                local1[2, 0] ** 2 - local1[0, 2] ** 2,
                local2[2, 0] ** 2 - local2[0, 2] ** 2,
            ]
        )
        return cls(coords, local1, local2, w, hinge)

    def centers(self):
        """Centers of both top simplices in the hinge frame."""
        return (
            center_from_local(self.points(0), self.local1),
            center_from_local(self.points(1), self.local2),
        )

    def offsets(self):
        """Signed distances from the face to each center, toward each apex."""
        n = self.n
        if n == 2:
            ell = self.coords[1, 0]
            out = []
            for side in (0, 1):
                P = self.coords[[0, 1, 2 + side]]
                L = np.zeros((3, 3))
                L[0, 1] = L[1, 0] = ell
                L[0, 2] = L[2, 0] = np.hypot(*P[2])
                L[1, 2] = L[2, 1] = np.hypot(*(P[2] - P[1]))
                out.append(edge_offset(self.local(side), L, 0, 1, 2))
            return tuple(out)
        c1, c2 = self.centers()
        face = list(range(n))
        return (
            signed_distance(self.coords, face, n, c1),
            signed_distance(self.coords, face, n + 1, c2),
        )

    def dual_length(self):
        """Signed dual volume of the shared face."""
        d1, d2 = self.offsets()
        return d1 + d2

    def power_margin(self):
        """Power of the second apex w.r.t. the first center, minus its weight."""
        n = self.n
        c = compute_center(self.points(0), weights=self.weights[: n + 1])
        apex = self.coords[n + 1]
        return float(((c.point - apex) ** 2).sum() - c.weight - self.weights[n + 1])


def _face_corners(cx, t, mask):
    m = cx.n + 1
    pos = [i for i in range(m) if mask >> i & 1]
    _, _, perm = cx.faces[t][mask]
    corners = [None] * len(pos)
    for i, r in enumerate(perm):
        corners[r] = pos[i]
    return corners


def embed_hinge(metric, hinge):
    """Embed a :class:`~dualtri.complex.Hinge` of the metric's complex.

    Face corners come in the face's root order, so they match between the
    two top simplices even in a Delta-complex.
    """
    cx = metric.complex
    dm = as_duality(metric)
    n = cx.n
    full = (1 << (n + 1)) - 1
    orders = []
    for t, p in zip(hinge.cofaces, hinge.corners):
        orders.append(_face_corners(cx, t, full & ~(1 << p)) + [p])
    t1, t2 = hinge.cofaces
    l1 = edge_length_matrix(cx, dm.lengths, t1)[np.ix_(orders[0], orders[0])]
    l2 = edge_length_matrix(cx, dm.lengths, t2)[np.ix_(orders[1], orders[1])]
    d1 = local_length_matrix(dm, t1)[np.ix_(orders[0], orders[0])]
    d2 = local_length_matrix(dm, t2)[np.ix_(orders[1], orders[1])]
    return HingeEmbedding.from_lengths(l1[:n, :n], l1[n, :n], l2[n, :n], d1, d2, hinge)


def center_from_local(points, local):
    """Center of a simplex given corner points and local lengths.

    Solves ``(C - P_0) . (P_q - P_0) = D[0, q] |P_q - P_0|`` for ``C`` in the
    affine span of the points.
    """
    points = np.asarray(points, dtype=float)
    m = len(points) - 1
    if m == 0:
        return points[0].copy()
    edges = points[1:] - points[0]
    ell = np.sqrt((edges**2).sum(1))
    rhs = np.asarray(local, dtype=float)[0, 1:] * ell
    gram = edges @ edges.T
    try:
        lam = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        raise Degenerate("cannot locate center of a degenerate simplex") from None
    return points[0] + lam @ edges


def compute_center(points, weights=None, local=None):
    """Center of a simplex and the weight (squared radius) attached to it.

    With ``weights`` the center solves the power equalities
    ``|C - P_i|^2 - r^2 = w_i``; with ``local`` lengths it is the common
    point of the hyperplanes through the edge centers perpendicular to the
    edges. In the second case corner weights are reconstructed in the gauge
    where corner 0 has weight 0, so the returned weight is defined up to the
    same additive constant.
    """
    points = np.asarray(points, dtype=float)
    if weights is None and local is None:
        raise ValueError("need weights or local lengths")
    if weights is not None:
        w = np.asarray(weights, dtype=float)
        edges = points[1:] - points[0]
        if len(edges) == 0:
            return Center(points[0].copy(), -w[0])
        rhs = 0.5 * ((edges**2).sum(1) + w[0] - w[1:])
        try:
            lam = np.linalg.solve(edges @ edges.T, rhs)
        except np.linalg.LinAlgError:
            raise Degenerate("cannot locate center of a degenerate simplex") from None
        c = points[0] + lam @ edges
        return Center(c, float(((c - points[0]) ** 2).sum() - w[0]))
    local = np.asarray(local, dtype=float)
    c = center_from_local(points, local)
    return Center(c, float(((c - points[0]) ** 2).sum()))


def perpendicularity_residuals(points, local, center):
    """``(C - P_p) . u_pq - D[p, q]`` for every ordered corner pair."""
    points = np.asarray(points, dtype=float)
    m = len(points)
    out = []
    for p in range(m):
        for q in range(m):
            if p == q:
                continue
            u = points[q] - points[p]
            ell = np.sqrt(u @ u)
            out.append((center - points[p]) @ u / ell - local[p, q])
    return np.array(out)


def _unit_normal(points, face_idx, p):
    base = points[face_idx[0]]
    span = points[face_idx[1:]] - base
    u = points[p] - base
    if len(span):
        coef = np.linalg.solve(span @ span.T, span @ u)
        u = u - coef @ span
    norm = np.sqrt(u @ u)
    if norm == 0:
        raise Degenerate("corner lies in the span of the face")
    return base, u / norm


def signed_distance(points, face_idx, p, center):
    """Signed distance from the span of a face to the center of face + {p}.

    Parameters
    ----------
    points : (m, N) array
        Corner coordinates in a common frame.
    face_idx : sequence of int
        Rows of ``points`` spanning the face.
    p : int
        Row of the extra corner; positive distances point toward it.
    center : (N,) array
        Center of the enlarged simplex.
    """
    base, normal = _unit_normal(np.asarray(points, dtype=float), list(face_idx), p)
    return float((np.asarray(center) - base) @ normal)


def center_offset_2d(d_ij, d_ik, l_ij, l_ik, l_jk, tol=1e-12):
    """Signed distance from edge {i,j} to the center of triangle {i,j,k}.

    Closed form ``(d_ik - d_ij cos g_i) / sin g_i`` with ``g_i`` the angle
    at ``i`` from the law of cosines.
    """
    cos_i = (l_ij**2 + l_ik**2 - l_jk**2) / (2 * l_ij * l_ik)
    sin_i = 2 * triangle_area(l_ij, l_ik, l_jk) / (l_ij * l_ik)
    if sin_i <= tol:
        raise DegenerateAngle("angle at vertex is 0 or pi")
    return (d_ik - d_ij * cos_i) / sin_i


def edge_offset(D, L, p, q, r, tol=1e-12):
    """Signed distance from edge {p, q} of a triangle to its center.

    ``D`` and ``L`` are the triangle's local and edge length matrices;
    positive values point toward corner ``r``. The closed form is taken at
    the endpoint with the larger angle, where it does not cancel.
    """
    if L[q, r] < L[p, r]:
        p, q = q, p
    return center_offset_2d(D[p, q], D[p, r], L[p, q], L[p, r], L[q, r], tol)


def barycentric(points, x):
    """Barycentric coordinates of ``x`` with respect to ``points``."""
    points = np.asarray(points, dtype=float)
    a = np.vstack([points.T, np.ones(len(points))])
    b = np.append(np.asarray(x, dtype=float), 1.0)
    lam, *_ = np.linalg.lstsq(a, b, rcond=None)
    return lam


def _bits(mask, m):
    return [i for i in range(m) if mask >> i & 1]


class DualGeometry:
    """Centers, signed distances and volumes over a whole complex.

    Build with :func:`compute_geometry`.

    Attributes
    ----------
    coords : list of ndarray
        Corner coordinates of each top simplex in its own frame.
    centers : list of dict
        ``centers[t][mask]``: center of the face of ``t`` spanned by the
        corners in ``mask``, in the frame of ``t``.
    distances : list of dict
        ``distances[t][(mask, p)]``: signed distance from face ``mask`` to
        the center of ``mask | 1 << p``.
    volumes : list of ndarray
        ``volumes[k][sid]`` = unsigned k-volume from the chain formula.
    dual_volumes : list of ndarray
        ``dual_volumes[k][sid]`` = signed (n-k)-volume of the dual cell.
    center_weights : list of ndarray or None
        Squared radius attached to each center when vertex weights are
        available (``None`` for duality metrics with a loop obstruction).
    """

    def __init__(self, metric):
        self.metric = metric
        self.dmetric = as_duality(metric)
        cx = metric.complex
        self.complex = cx
        n = cx.n
        m = n + 1
        full = (1 << m) - 1
        # the input lengths, not d_ij + d_ji, which may be an ulp off
        lengths = np.asarray(metric.lengths, dtype=float)
        self.lengths = lengths
        self.coords, self.centers, self.distances = [], [], []
        self._up, self._down = [], []
        self.perp_residual = 0.0
        for t in range(cx.num_tops):
            pts = embed_lengths(edge_length_matrix(cx, lengths, t))
            loc = local_length_matrix(self.dmetric, t)
            cen = {}
            for mask in range(1, full + 1):
                idx = _bits(mask, m)
                sub_loc = loc[np.ix_(idx, idx)]
                c = center_from_local(pts[idx], sub_loc)
                cen[mask] = c
                if len(idx) > 2:
                    res = perpendicularity_residuals(pts[idx], sub_loc, c)
                    scale = lengths.max()
                    self.perp_residual = max(self.perp_residual, float(np.abs(res).max()) / scale)
            dist = {}
            tri_len = edge_length_matrix(cx, lengths, t) if n == 2 else None
            for mask in range(1, full):
                idx = _bits(mask, m)
                for p in range(m):
                    if not mask >> p & 1:
                        if n == 2 and len(idx) == 2:
                            dist[(mask, p)] = edge_offset(loc, tri_len, idx[0], idx[1], p)
                        else:
                            dist[(mask, p)] = signed_distance(pts, idx, p, cen[mask | 1 << p])
            up = {}
            for mask in sorted(range(1, full + 1), key=lambda x: bin(x).count("1")):
                idx = _bits(mask, m)
                if len(idx) == 1:
                    up[mask] = 1.0
                else:
                    up[mask] = sum(up[mask & ~(1 << p)] * dist[(mask & ~(1 << p), p)] for p in idx)
            down = {full: 1.0}
            for mask in sorted(range(1, full), key=lambda x: -bin(x).count("1")):
                down[mask] = sum(
                    dist[(mask, p)] * down[mask | 1 << p] for p in range(m) if not mask >> p & 1
                )
            self.coords.append(pts)
            self.centers.append(cen)
            self.distances.append(dist)
            self._up.append(up)
            self._down.append(down)

        self.volumes = [np.zeros(cx.count(k)) for k in range(n + 1)]
        self.dual_volumes = [np.zeros(cx.count(k)) for k in range(n + 1)]
        for k in range(n + 1):
            for sid in range(cx.count(k)):
                t, corners = cx.occurrence(k, sid)
                mask = sum(1 << c for c in corners)
                self.volumes[k][sid] = self._up[t][mask] / factorial(k)
        for t, table in enumerate(cx.faces):
            for mask, (k, sid, _) in table.items():
                self.dual_volumes[k][sid] += self._down[t][mask] / factorial(n - k)

        self.vertex_weights = self._vertex_weights()
        self.center_weights = None
        if self.vertex_weights is not None:
            self.center_weights = [np.zeros(cx.count(k)) for k in range(n + 1)]
            for k in range(n + 1):
                for sid in range(cx.count(k)):
                    t, corners = cx.occurrence(k, sid)
                    mask = sum(1 << c for c in corners)
                    v0 = cx.top_vertices(t)[corners[0]]
                    c = self.centers[t][mask]
                    p0 = self.coords[t][corners[0]]
                    self.center_weights[k][sid] = ((c - p0) ** 2).sum() - self.vertex_weights[v0]

    def _vertex_weights(self):
        m = self.metric
        if m.kind == "weighted":
            return np.asarray(m.weights, dtype=float)
        if m.kind == "thurston":
            return np.asarray(m.weights, dtype=float)
        if m.kind == "euclidean":
            return np.zeros(m.complex.num_vertices)
        try:
            return duality_to_weighted(m).weights
        except LoopObstruction:
            return None

    def center_barycentric(self, k, sid, t=None, corners=None):
        """Barycentric coordinates of a simplex's center in root order."""
        cx = self.complex
        if t is None:
            t, corners = cx.occurrence(k, sid)
        mask = sum(1 << c for c in corners)
        return barycentric(self.coords[t][corners], self.centers[t][mask])

    def frame_mismatch(self):
        """Largest disagreement of a shared face's center between frames.

        Compares barycentric coordinates (root order) of every face center
        across all top simplices containing the face.
        """
        cx = self.complex
        seen = {}
        worst = 0.0
        m = cx.n + 1
        for t, table in enumerate(cx.faces):
            for mask, (k, sid, perm) in table.items():
                if k == 0:
                    continue
                pos = _bits(mask, m)
                corners = [None] * len(pos)
                for i, r in enumerate(perm):
                    corners[r] = pos[i]
                lam = self.center_barycentric(k, sid, t, corners)
                key = (k, sid)
                if key in seen:
                    worst = max(worst, float(np.abs(lam - seen[key]).max()))
                else:
                    seen[key] = lam
        return worst

    def hinge_margin(self, fid):
        """Signed dual length of an interior (n-1)-simplex."""
        return float(self.dual_volumes[self.complex.n - 1][fid])


def compute_geometry(metric):
    """Compute the :class:`DualGeometry` of any metric structure."""
    return DualGeometry(metric)


def simplex_volume(geometry, k, sid):
    return float(geometry.volumes[k][sid])


def dual_volume(geometry, k, sid):
    return float(geometry.dual_volumes[k][sid])


@dataclass
class VolumeReport:
    simplex_total: float
    dual_total: float
    closed: bool
    rel_tol: float = 1e-9

    @property
    def difference(self):
        return self.simplex_total - self.dual_total

    @property
    def passed(self):
        return abs(self.difference) <= self.rel_tol * abs(self.simplex_total)


def total_volume_check(geometry, rel_tol=1e-9):
    """Compare the total volume with the sum of vertex dual volumes.

    For complexes with boundary the duals are truncated to existing cofaces;
    the identity still holds for the truncated duals and ``closed`` is
    reported as False.
    """
    n = geometry.complex.n
    return VolumeReport(
        float(geometry.volumes[n].sum()),
        float(geometry.dual_volumes[0].sum()),
        geometry.complex.is_closed,
        rel_tol,
    )
