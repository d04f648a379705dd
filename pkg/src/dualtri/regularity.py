"""Regularity predicates, the 2-2 flip and the flip algorithm.

A hinge is locally regular when the signed dual volume of its shared face
is nonnegative. Equivalently the power of either apex with respect to the
other simplex's center exceeds that apex's weight. Both tests are available
in every dimension; flips are implemented for surfaces only.

Flips act on a :class:`FlipMesh`, a mutable triangle soup with explicit edge
sides so that Delta-complexes (repeated vertices, multiple edges between the
same pair) are handled. Edge ids survive flips: the new diagonal takes over
the id of the edge it replaces.
"""
import csv
import warnings
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from .complex import build_complex
from .errors import DegenerateFlip, DegenerateHinge, NotFlippable
from .geometry import HingeEmbedding, edge_offset, embed_hinge
from .metric import DualityMetric, as_duality

__all__ = [
    "Stalled",
    "RegularityResult",
    "FlipRecord",
    "RippaResult",
    "RegularizeResult",
    "FlipMesh",
    "power_distance",
    "is_locally_regular",
    "hinge_regularity",
    "is_convex_quadrilateral",
    "is_flippable",
    "flip_values",
    "flip_edge",
    "is_edge_positive",
    "is_m_central",
    "rippa_delta",
    "regularize",
]


class Stalled(UserWarning):
    """A non-regular edge that cannot be flipped was met during regularize."""


def power_distance(x, p, w_p):
    """Power of point ``x`` with respect to the weighted point ``(p, w_p)``."""
    diff = np.asarray(x, dtype=float) - np.asarray(p, dtype=float)
    return float(diff @ diff - w_p)


@dataclass(frozen=True)
class RegularityResult:
    """Outcome of a local regularity test.

    ``margin`` is the signed dual volume of the shared face and
    ``power_margin`` the power of the second apex minus its weight. The
    hinge counts as regular when ``margin >= -tol`` (ties are regular);
    ``strict`` is False for such ties.
    """

    regular: bool
    strict: bool
    margin: float
    power_margin: float
    center_gap: float

    @property
    def consistent(self):
        """True when both tests give the same verdict."""
        return (self.margin > 0) == (self.power_margin > 0) or self.margin == 0

    def __bool__(self):
        return self.regular


def hinge_regularity(emb, tol=1e-12):
    """Run both regularity tests on a :class:`HingeEmbedding`."""
    scale = np.abs(emb.coords).max()
    margin = emb.dual_length()
    power = emb.power_margin()
    c1, c2 = emb.centers()
    gap = float(np.sqrt(((c1 - c2) ** 2).sum()))
    thresh = tol * scale
    return RegularityResult(bool(margin >= -thresh), bool(margin > thresh), float(margin), power, gap)


def is_locally_regular(metric, hinge, tol=1e-12):
    """Local regularity of a hinge of any dimension.

    Parameters
    ----------
    metric : metric structure
        Any of the four kinds; converted to local lengths internally.
    hinge : Hinge
        From :func:`~dualtri.complex.enumerate_hinges`.
    tol : float
        Relative width of the tie zone around a zero margin.

    Returns
    -------
    RegularityResult
    """
    return hinge_regularity(embed_hinge(metric, hinge), tol)


def is_convex_quadrilateral(a, b, c, d):
    """True iff the polygon a, b, c, d is strictly convex."""
    pts = [np.asarray(p, dtype=float) for p in (a, b, c, d)]
    signs = []
    for i in range(4):
        u = pts[(i + 1) % 4] - pts[i]
        v = pts[(i + 2) % 4] - pts[(i + 1) % 4]
        signs.append(u[0] * v[1] - u[1] * v[0])
    return all(s > 0 for s in signs) or all(s < 0 for s in signs)


def _flippable(emb, tol=1e-12):
    if emb.n != 2:
        return False
    ell = emb.coords[1, 0]
    (xk, hk), (xl, hl) = emb.coords[2], emb.coords[3]
    x = xk + (xl - xk) * hk / (hk - hl)
    return tol * ell < x < (1 - tol) * ell


def is_flippable(metric, hinge, tol=1e-12):
    """True iff the hinge's quadrilateral is strictly convex (surfaces only).

    A straight angle at an end of the shared edge counts as not flippable.
    """
    emb = hinge if isinstance(hinge, HingeEmbedding) else embed_hinge(metric, hinge)
    return _flippable(emb, tol)


def flip_values(emb):
    """Local lengths ``(d_kl, d_lk)`` on the diagonal created by a flip.

    Uses the hinge's corner order i, j (shared edge), k, l (apexes).
    """
    k, l = emb.coords[2], emb.coords[3]
    dist = float(np.sqrt(((k - l) ** 2).sum()))
    if dist == 0:
        raise DegenerateFlip("apexes coincide")
    d1, d2 = emb.local1, emb.local2
    diff = (d1[2, 0] ** 2 + d2[0, 2] ** 2 - d2[2, 0] ** 2 - d1[0, 2] ** 2) / dist
    return 0.5 * (dist + diff), 0.5 * (dist - diff)


def _exact_triangle_energy(points, weights, f):
    """Dirichlet energy of one planar triangle in exact rational arithmetic.

    With corners, weights and values taken as exact binary fractions the
    center solves a linear system and each coefficient ``h / l`` equals a
    cross product over ``l^2``, so no rounding enters.
    """
    P = [(Fraction(x), Fraction(y)) for x, y in points]
    w = [Fraction(x) for x in weights]
    f = [Fraction(x) for x in f]
    (x0, y0), (x1, y1), (x2, y2) = P
    a11, a12 = 2 * (x1 - x0), 2 * (y1 - y0)
    a21, a22 = 2 * (x2 - x0), 2 * (y2 - y0)
    b1 = x1 * x1 + y1 * y1 - x0 * x0 - y0 * y0 - w[1] + w[0]
    b2 = x2 * x2 + y2 * y2 - x0 * x0 - y0 * y0 - w[2] + w[0]
    det = a11 * a22 - a12 * a21
    cx = (b1 * a22 - b2 * a12) / det
    cy = (a11 * b2 - a21 * b1) / det

    def cross(o, u, v):
        return (u[0] - o[0]) * (v[1] - o[1]) - (u[1] - o[1]) * (v[0] - o[0])

    total = Fraction(0)
    for r in range(3):
        p, q = [i for i in range(3) if i != r]
        side = 1 if cross(P[p], P[q], P[r]) > 0 else -1
        ell2 = (P[q][0] - P[p][0]) ** 2 + (P[q][1] - P[p][1]) ** 2
        coeff = side * cross(P[p], P[q], (cx, cy)) / ell2
        total += coeff * (f[p] - f[q]) ** 2
    return total / 2


def _area(a, b, c):
    u, v = b - a, c - a
    return 0.5 * abs(u[0] * v[1] - u[1] * v[0])


@dataclass(frozen=True)
class RippaResult:
    """Energy change of a flip computed two ways, and the factor ``phi``."""

    direct: float
    factorized: float
    phi: float


def _rippa(emb, f):
    f = np.asarray(f, dtype=float)
    P = emb.coords
    w = emb.weights
    i, j, k, l = P
    a123 = _area(i, j, k)
    a124 = _area(i, j, l)
    a134 = _area(i, k, l)
    a234 = _area(j, k, l)
    a1234 = a123 + a124
    # intersection of the diagonals: on the first axis, between i and j
    x = k[0] + (l[0] - k[0]) * k[1] / (k[1] - l[1])
    c = np.array([x, 0.0])
    r1, r2, r3, r4 = (float(np.sqrt(((c - p) ** 2).sum())) for p in P)
    l12 = r1 + r2
    l34 = r3 + r4
    # the chord term enters with coefficient 1; verified against ``direct``
    phi = (
        (r3 * r4 - r1 * r2) * a1234 + w[0] * a234 + w[1] * a134 - w[2] * a124 - w[3] * a123
    ) / (8 * a123 * a134 * a234 * a124)
    ft = (r1 / l12) * f[1] + (r2 / l12) * f[0]
    ft2 = (r3 / l34) * f[3] + (r4 / l34) * f[2]
    factorized = (ft2 - ft) ** 2 * a1234**2 * phi

    def energy(tris):
        # exact: the difference is often tiny next to the energies themselves
        return sum(_exact_triangle_energy(P[list(t)], w[list(t)], f[list(t)]) for t in tris)

    direct = energy([(0, 3, 2), (1, 2, 3)]) - energy([(0, 1, 2), (0, 1, 3)])
    return RippaResult(float(direct), float(factorized), float(phi))


def rippa_delta(metric, hinge, f):
    """Energy change caused by flipping a surface hinge.

    Parameters
    ----------
    metric : metric structure or None
        Ignored when ``hinge`` is already a :class:`HingeEmbedding`.
    hinge : Hinge or HingeEmbedding
    f : sequence of 4 floats
        Function values on the hinge corners i, j (shared edge), k, l.

    Returns
    -------
    RippaResult
        ``direct`` is ``E(after) - E(before)`` summed over the two
        triangles; ``factorized`` is the closed-form product with ``phi``.

    Raises
    ------
    DegenerateHinge
        If the hinge is not flippable (no interior diagonal crossing).
    """
    emb = hinge if isinstance(hinge, HingeEmbedding) else embed_hinge(metric, hinge)
    if emb.n != 2:
        raise DegenerateHinge("energy factorization is defined for surfaces")
    if not _flippable(emb):
        raise DegenerateHinge("diagonals do not cross inside the hinge")
    return _rippa(emb, f)


@dataclass(frozen=True)
class FlipRecord:
    """One executed flip.

    Attributes
    ----------
    edge : int
        Id of the removed edge, reused by the created one.
    vertices : tuple
        Vertex ids ``(k, l)`` of the created edge.
    d_new : tuple
        Local lengths ``(d_kl, d_lk)`` of the created edge.
    margin_before, margin_after : float
        Dual length of the removed and of the created edge.
    energy_before, energy_after : float
        Dirichlet energy of the instrumentation function on the whole mesh.
    phi : float
        Sign factor of the energy change; negative for regularizing flips.
    """

    edge: int
    vertices: tuple
    d_new: tuple
    margin_before: float
    margin_after: float
    energy_before: float = float("nan")
    energy_after: float = float("nan")
    phi: float = float("nan")


class FlipMesh:
    """Mutable working copy of a triangulated surface with local lengths.

    ``tris[t]`` lists vertex ids by corner. ``tri_edges[t][c]`` is
    ``(e, a)``: the edge opposite corner ``c`` and the corner of ``t`` at that
    edge's first endpoint. ``sides[e]`` lists ``(t, c)`` pairs. ``d[e]`` holds
    the local lengths at the first and second endpoint.
    """

    def __init__(self, metric):
        dm = as_duality(metric)
        cx = dm.complex
        if cx.n != 2:
            raise ValueError("flip meshes are two-dimensional")
        self.complex = cx
        self.num_vertices = cx.num_vertices
        self.vertex_labels = [cx.vertex_label(v) for v in range(cx.num_vertices)]
        self.d = np.array(dm.d, dtype=float)
        self.edge_verts = [tuple(cx.edge_vertices(e)) for e in range(cx.num_edges)]
        self.tris = [list(cx.top_vertices(t)) for t in range(cx.num_tops)]
        self.tri_edges = []
        self.sides = [[] for _ in range(cx.num_edges)]
        for t in range(cx.num_tops):
            row = []
            for c in range(3):
                p, q = [i for i in range(3) if i != c]
                e, fwd = cx.edge_at(t, p, q)
                row.append((e, p if fwd else q))
                self.sides[e].append((t, c))
            self.tri_edges.append(row)

    # local data ------------------------------------------------------------
    def length(self, e):
        return self.d[e, 0] + self.d[e, 1]

    def local(self, t, p, q):
        e, a = self.tri_edges[t][3 - p - q]
        return self.d[e, 0] if p == a else self.d[e, 1]

    def tri_lengths(self, t):
        L = np.zeros((3, 3))
        for c in range(3):
            p, q = [i for i in range(3) if i != c]
            L[p, q] = L[q, p] = self.length(self.tri_edges[t][c][0])
        return L

    def tri_local(self, t):
        D = np.zeros((3, 3))
        for p in range(3):
            for q in range(3):
                if p != q:
                    D[p, q] = self.local(t, p, q)
        return D

    def interior_edges(self):
        return [e for e, s in enumerate(self.sides) if len(s) == 2]

    def hinge_corners(self, e):
        """``((t1, i1, j1, k), (t2, i2, j2, l))`` or None for boundary edges."""
        if len(self.sides[e]) != 2:
            return None
        out = []
        for t, c in self.sides[e]:
            _, a = self.tri_edges[t][c]
            out.append((t, a, 3 - a - c, c))
        return tuple(out)

    def embed(self, e):
        """:class:`HingeEmbedding` of interior edge ``e``."""
        hc = self.hinge_corners(e)
        if hc is None:
            raise DegenerateHinge("edge %d is on the boundary" % e)
        (t1, i1, j1, k), (t2, i2, j2, l) = hc
        if t1 == t2:
            raise DegenerateHinge("edge %d has both sides in one triangle" % e)
        ell = self.length(e)
        apex = []
        for t, i, j, c in hc:
            apex.append((self.length(self.tri_edges[t][j][0]), self.length(self.tri_edges[t][i][0])))
        D1 = [[0.0 if p == q else self.local(t1, p, q) for q in (i1, j1, k)] for p in (i1, j1, k)]
        D2 = [[0.0 if p == q else self.local(t2, p, q) for q in (i2, j2, l)] for p in (i2, j2, l)]
        return HingeEmbedding.from_lengths([[0.0, ell], [ell, 0.0]], apex[0], apex[1], D1, D2)

    def margin(self, e):
        return self.embed(e).dual_length()

    # energies --------------------------------------------------------------
    def _tri_coefficients(self, t):
        L = np.zeros((3, 3))
        D = np.zeros((3, 3))
        for c in range(3):
            p, q = [i for i in range(3) if i != c]
            L[p, q] = L[q, p] = self.length(self.tri_edges[t][c][0])
            D[p, q] = self.local(t, p, q)
            D[q, p] = self.local(t, q, p)
        out = []
        for r in range(3):
            p, q = [i for i in range(3) if i != r]
            out.append((p, q, edge_offset(D, L, p, q, r) / L[p, q]))
        return out

    def energy(self, f):
        """Dirichlet energy of vertex function ``f``."""
        total = 0.0
        for t, tri in enumerate(self.tris):
            for p, q, c in self._tri_coefficients(t):
                total += 0.5 * c * (f[tri[p]] - f[tri[q]]) ** 2
        return total

    def laplacian(self):
        """Dense vertex Laplacian (off-diagonal sums of dual length / length)."""
        n = self.num_vertices
        L = np.zeros((n, n))
        for t, tri in enumerate(self.tris):
            for p, q, c in self._tri_coefficients(t):
                a, b = tri[p], tri[q]
                if a != b:
                    L[a, b] += c
                    L[b, a] += c
        L[np.diag_indices(n)] = -L.sum(1)
        return L

    # flipping --------------------------------------------------------------
    def flip(self, e, f=None, tol=1e-12, energy=None, emb=None):
        """Flip interior edge ``e`` in place and return a :class:`FlipRecord`.

        With ``f`` given the record carries the mesh energy before and after;
        pass the current ``energy`` to skip recomputing it. The change itself
        is always evaluated on the hinge alone.
        """
        if emb is None:
            emb = self.embed(e)
        if not _flippable(emb, tol):
            raise NotFlippable("edge %d: quadrilateral is not strictly convex" % e)
        d_kl, d_lk = flip_values(emb)
        (t1, a1, b1, c1), (t2, a2, b2, c2) = self.hinge_corners(e)
        vi, vj, vk = self.tris[t1][a1], self.tris[t1][b1], self.tris[t1][c1]
        vl = self.tris[t2][c2]
        e_ik, e_jk = self.tri_edges[t1][b1], self.tri_edges[t1][a1]
        e_il, e_jl = self.tri_edges[t2][b2], self.tri_edges[t2][a2]
        energy_before = energy_after = phi = float("nan")
        if f is not None:
            energy_before = self.energy(f) if energy is None else energy
            rip = _rippa(emb, [f[vi], f[vj], f[vk], f[vl]])
            phi = rip.phi
            energy_after = energy_before + rip.direct

        # new t1 = (i, l, k), new t2 = (j, k, l)
        self.tris[t1] = [vi, vl, vk]
        self.tris[t2] = [vj, vk, vl]
        new1 = [
            (e, 2),
            (e_ik[0], 0 if e_ik[1] == a1 else 2),
            (e_il[0], 0 if e_il[1] == a2 else 1),
        ]
        new2 = [
            (e, 1),
            (e_jl[0], 0 if e_jl[1] == b2 else 2),
            (e_jk[0], 0 if e_jk[1] == b1 else 1),
        ]
        moves = [
            (e_ik[0], (t1, b1), (t1, 1)),
            (e_jk[0], (t1, a1), (t2, 2)),
            (e_il[0], (t2, b2), (t1, 2)),
            (e_jl[0], (t2, a2), (t2, 1)),
        ]
        slots = [(edge, self.sides[edge].index(old), new) for edge, old, new in moves]
        for edge, idx, new in slots:
            self.sides[edge][idx] = new
        self.tri_edges[t1] = new1
        self.tri_edges[t2] = new2
        self.sides[e] = [(t1, 0), (t2, 0)]
        self.edge_verts[e] = (vk, vl)
        margin_before = emb.dual_length()
        self.d[e] = (d_kl, d_lk)
        for t in (t1, t2):
            L = self.tri_lengths(t)
            if min(L[0, 1] + L[1, 2] - L[0, 2], L[0, 1] + L[0, 2] - L[1, 2], L[0, 2] + L[1, 2] - L[0, 1]) <= tol * L.max():
                raise DegenerateFlip("flip of edge %d creates a degenerate triangle" % e)
        margin_after = self.margin(e)
        return FlipRecord(
            e,
            (vk, vl),
            (float(d_kl), float(d_lk)),
            float(margin_before),
            float(margin_after),
            float(energy_before),
            float(energy_after),
            float(phi),
        )

    # export ----------------------------------------------------------------
    def _is_simplicial(self):
        pairs = {}
        for e, (a, b) in enumerate(self.edge_verts):
            key = (min(a, b), max(a, b))
            if a == b or key in pairs:
                return False
            pairs[key] = e
        triples = set()
        for tri in self.tris:
            if len(set(tri)) < 3:
                return False
            key = tuple(sorted(tri))
            if key in triples:
                return False
            triples.add(key)
        return True

    def to_metric(self):
        """Rebuild an immutable complex and :class:`DualityMetric`.

        Vertex ids and labels are preserved; edge and triangle ids follow the
        new complex's canonical order.
        """
        if self._is_simplicial():
            labels = [[self.vertex_labels[v] for v in tri] for tri in self.tris]
            gluings = []
        else:
            fresh = max(self.vertex_labels) + 1
            used = set()
            labels = []
            for tri in self.tris:
                row = []
                for v in tri:
                    if v in used:
                        row.append(fresh)
                        fresh += 1
                    else:
                        row.append(self.vertex_labels[v])
                        used.add(v)
                labels.append(row)
            gluings = []
            for e, s in enumerate(self.sides):
                if len(s) != 2:
                    continue
                pair = []
                for t, c in s:
                    _, a = self.tri_edges[t][c]
                    pair.append((labels[t][a], labels[t][3 - a - c]))
                gluings.append(tuple(pair))
        cx = build_complex(labels, n=2, gluings=gluings)
        where = {tuple(sorted(row)): t for t, row in enumerate(labels)}
        d = np.zeros((cx.num_edges, 2))
        for e in range(cx.num_edges):
            t_new, (p, q) = cx.occurrence(1, e)
            root = cx.roots[2][t_new]
            t = where[root]
            slot = [labels[t].index(lab) for lab in root]
            d[e] = (self.local(t, slot[p], slot[q]), self.local(t, slot[q], slot[p]))
        return DualityMetric(cx, d)


def flip_edge(metric, hinge, f=None, tol=1e-12):
    """Flip one hinge of a surface.

    Returns
    -------
    (DualityMetric, FlipRecord)
        The new metric lives on a new complex; the record's edge id refers
        to the input complex.

    Raises
    ------
    NotFlippable
        If the hinge's quadrilateral is not strictly convex.
    DegenerateFlip
        If a created triangle is degenerate.
    """
    mesh = FlipMesh(metric)
    rec = mesh.flip(hinge.face, f, tol)
    return mesh.to_metric(), rec


def _mesh_edge_positive(mesh, tol=0.0):
    bad = []
    for e in range(len(mesh.d)):
        if min(mesh.d[e]) <= tol:
            bad.append(("local", e))
    for e in mesh.interior_edges():
        try:
            emb = mesh.embed(e)
        except DegenerateHinge:
            continue
        if _flippable(emb) and min(flip_values(emb)) <= tol:
            bad.append(("flip", e))
    return bad


def is_edge_positive(metric, tol=0.0):
    """Check positivity of all local lengths, including hypothetical flips.

    Returns
    -------
    (bool, list)
        Witnesses are ``("local", e)`` for a nonpositive stored local length
        and ``("flip", e)`` when flipping ``e`` would create one.
    """
    bad = _mesh_edge_positive(FlipMesh(metric), tol)
    return not bad, bad


def is_m_central(geometry, m, tol=1e-12):
    """Check that every simplex of dimension 1..m contains its center.

    Returns
    -------
    (bool, list of (k, id))
    """
    cx = geometry.complex
    bad = []
    for k in range(1, min(m, cx.n) + 1):
        for sid in range(cx.count(k)):
            lam = geometry.center_barycentric(k, sid)
            if lam.min() <= tol:
                bad.append((k, sid))
    return not bad, bad


def _entropy(L):
    from .laplace import entropy_from_matrix

    return entropy_from_matrix(L)


@dataclass
class RegularizeResult:
    """Outcome of :func:`regularize`.

    ``energies[0]`` is the initial energy and ``energies[i]`` the energy
    after flip ``i``; ``entropies`` follows the same layout when tracked.
    """

    metric: DualityMetric
    flips: list
    energies: list
    entropies: list = field(default_factory=list)
    stalled: list = field(default_factory=list)
    edge_positive: bool = True
    capped: bool = False
    mesh: object = None

    def margins(self):
        return {e: self.mesh.margin(e) for e in self.mesh.interior_edges()}


def regularize(metric, f=None, seed=0, tol=1e-12, max_flips=None, track_entropy=False, energy_log=None):
    """Flip non-regular edges until every hinge is locally regular.

    Parameters
    ----------
    metric : metric structure on a surface
    f : array, optional
        Instrumentation function on vertices; its Dirichlet energy is logged
        after every flip. Defaults to a seeded random unit vector.
    seed : int
        Seed for the default ``f``.
    tol : float
        Relative tie zone for margins and convexity.
    max_flips : int, optional
        Hard cap on the number of flips.
    track_entropy : bool
        Also log the entropy after every flip.
    energy_log : path, optional
        Write a CSV with columns ``flip,edge,phi,energy``.

    Returns
    -------
    RegularizeResult
    """
    mesh = FlipMesh(metric)
    if f is None:
        rng = np.random.default_rng(seed)
        f = rng.standard_normal(mesh.num_vertices)
        f /= np.linalg.norm(f)
    f = np.asarray(f, dtype=float)
    witnesses = _mesh_edge_positive(mesh)
    positive = not witnesses
    if not positive:
        warnings.warn(
            "input is not edge positive (%d witnesses); regularizing best-effort" % len(witnesses),
            Stalled,
            stacklevel=2,
        )
    if max_flips is None:
        # never expected to bind
        max_flips = min(comb(len(mesh.tris) + len(mesh.d), 2) * 2 ** min(len(mesh.d), 20), 10**7)

    energies = [float(mesh.energy(f))]
    entropies = [_entropy(mesh.laplacian())] if track_entropy else []
    flips, stalled = [], []
    queue = deque()
    queued = set()

    def regular(e):
        try:
            emb = mesh.embed(e)
        except DegenerateHinge:
            return True, None
        return hinge_regularity(emb, tol).regular, emb

    for e in mesh.interior_edges():
        if not regular(e)[0]:
            queue.append(e)
            queued.add(e)
    capped = False
    while queue:
        e = queue.popleft()
        queued.discard(e)
        ok, emb = regular(e)
        if ok:
            continue
        if not _flippable(emb, tol):
            stalled.append(e)
            warnings.warn("edge %d is not regular and not flippable" % e, Stalled, stacklevel=2)
            continue
        if len(flips) >= max_flips:
            capped = True
            break
        (t1, _, _, _), (t2, _, _, _) = mesh.hinge_corners(e)
        rec = mesh.flip(e, f, tol, energy=energies[-1], emb=emb)
        flips.append(rec)
        energies.append(rec.energy_after)
        if track_entropy:
            entropies.append(_entropy(mesh.laplacian()))
        for t in (t1, t2):
            for other, _ in mesh.tri_edges[t]:
                if other != e and other not in queued and len(mesh.sides[other]) == 2:
                    queue.append(other)
                    queued.add(other)
    stalled = sorted(set(s for s in stalled if not regular(s)[0]))

    if energy_log is not None:
        with open(energy_log, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["flip", "edge", "phi", "energy"])
            w.writerow([0, "", "", "%.17g" % energies[0]])
            for i, rec in enumerate(flips, 1):
                w.writerow([i, rec.edge, "%.17g" % rec.phi, "%.17g" % rec.energy_after])

    return RegularizeResult(
        mesh.to_metric(), flips, energies, entropies, stalled, positive, capped, mesh
    )
