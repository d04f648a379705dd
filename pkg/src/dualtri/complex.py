"""Topological simplicial and Delta-complexes.

A complex is built from top simplices given as tuples of integer *labels*.
Faces with the same label set are the same face. Extra identifications
between (n-1)-faces can be declared as gluings, which turns the result into
a Delta-complex: after gluing, several labels may name the same vertex and a
simplex may have repeated vertices (the one-vertex torus is the standard
example). Every simplex gets an integer identifier per dimension; edges are
keyed by identifier, never by vertex pair.

Each simplex class has a *root* label tuple (the lexicographically smallest
sorted label tuple in the class). The root fixes the simplex's canonical
vertex order; for edges it fixes the stored orientation.
"""
from dataclasses import dataclass
from itertools import combinations

from .errors import MalformedInput, NonManifold, UnknownVertex

__all__ = [
    "Hinge",
    "SimplicialComplex",
    "build_complex",
    "enumerate_hinges",
    "vertex_star",
]


@dataclass(frozen=True)
class Hinge:
    """Two top simplices sharing an (n-1)-face.

    ``corners[s]`` is the position of the apex vertex inside ``cofaces[s]``;
    the shared face is that top simplex minus the apex corner.
    """

    face: int
    apexes: tuple
    cofaces: tuple
    corners: tuple


class _PermUnionFind:
    """Union-find over sorted label tuples, tracking vertex correspondences.

    ``parent[node] = (p, perm)`` means position ``i`` of ``node`` is
    identified with position ``perm[i]`` of ``p``.
    """

    def __init__(self, nodes):
        self.parent = {node: (node, tuple(range(len(node)))) for node in nodes}

    def find(self, node):
        path = []
        while True:
            p, perm = self.parent[node]
            if p == node:
                break
            path.append((node, perm))
            node = p
        root = node
        # compress; compose perms from the top of the path down
        acc = tuple(range(len(root)))
        for nd, perm in reversed(path):
            acc = tuple(acc[perm[i]] for i in range(len(perm)))
            self.parent[nd] = (root, acc)
        if path:
            return root, self.parent[path[0][0]][1]
        return root, acc

    def union(self, a, b, corr):
        """Identify node ``a`` with ``b``; position i of a <-> corr[i] of b."""
        ra, pa = self.find(a)
        rb, pb = self.find(b)
        # position pa[i] of ra <-> position pb[corr[i]] of rb
        link = [None] * len(a)
        for i in range(len(a)):
            link[pb[corr[i]]] = pa[i]
        link = tuple(link)
        if ra == rb:
            if link != tuple(range(len(a))):
                raise MalformedInput(
                    "gluing identifies simplex %s with itself under a "
                    "nontrivial vertex permutation" % (ra,)
                )
            return
        if rb < ra:
            inv = [None] * len(link)
            for i, j in enumerate(link):
                inv[j] = i
            self.parent[ra] = (rb, tuple(inv))
        else:
            self.parent[rb] = (ra, link)


def _sorted_with_positions(labels):
    order = sorted(range(len(labels)), key=lambda i: labels[i])
    return tuple(labels[i] for i in order), order


class SimplicialComplex:
    """Immutable simplicial (or Delta-) complex of dimension ``n``.

    Use :func:`build_complex` to construct one.

    Attributes
    ----------
    n : int
        Dimension.
    roots : list of list of tuple
        ``roots[k][id]`` is the root label tuple of k-simplex ``id``.
    simplex_vertices : list of list of tuple
        ``simplex_vertices[k][id]`` holds the vertex ids in root order;
        entries may repeat in a Delta-complex.
    faces : list of dict
        ``faces[t][mask]`` maps a bitmask of corner positions of top simplex
        ``t`` to ``(k, id, perm)``; ``perm[i]`` is the root position that the
        i-th selected corner (in increasing position order) corresponds to.
    cofaces : list of list
        ``cofaces[id]`` lists ``(t, mask)`` occurrences of the
        (n-1)-simplex ``id`` inside top simplices.
    gluings : tuple
        Canonicalized face gluings used to build the complex.
    """

    def __init__(self, n, roots, uf, gluings):
        self.n = n
        self.roots = roots
        self.gluings = gluings
        index = [{r: i for i, r in enumerate(rk)} for rk in roots]
        self._label_to_vertex = {}
        for v, (lab,) in enumerate(roots[0]):
            self._label_to_vertex[lab] = v
        for node in uf.parent:
            if len(node) == 1:
                root, _ = uf.find(node)
                self._label_to_vertex[node[0]] = index[0][root]
        self.simplex_vertices = [
            [tuple(self._label_to_vertex[lab] for lab in r) for r in rk]
            for rk in roots
        ]
        self.faces = []
        for top in roots[n]:
            table = {}
            for mask in range(1, 1 << (n + 1)):
                pos = [i for i in range(n + 1) if mask >> i & 1]
                node = tuple(top[i] for i in pos)
                root, perm = uf.find(node)
                k = len(node) - 1
                table[mask] = (k, index[k][root], perm)
            self.faces.append(table)
        self.cofaces = [[] for _ in roots[n - 1]] if n >= 1 else []
        full = (1 << (n + 1)) - 1
        for t, table in enumerate(self.faces):
            for p in range(n + 1):
                mask = full & ~(1 << p)
                _, fid, _ = table[mask]
                self.cofaces[fid].append((t, mask))
        self.labels = tuple(sorted(self._label_to_vertex))
        self._first = [[None] * len(rk) for rk in roots]
        for t, table in enumerate(self.faces):
            for mask, (k, sid, _) in table.items():
                if self._first[k][sid] is None:
                    self._first[k][sid] = (t, mask)

    # sizes -----------------------------------------------------------------
    def count(self, k):
        return len(self.roots[k])

    @property
    def num_vertices(self):
        return len(self.roots[0])

    @property
    def num_edges(self):
        return len(self.roots[1]) if self.n >= 1 else 0

    @property
    def num_tops(self):
        return len(self.roots[self.n])

    def euler_characteristic(self):
        return sum((-1) ** k * len(self.roots[k]) for k in range(self.n + 1))

    # lookups ---------------------------------------------------------------
    def vertex_of(self, label):
        try:
            return self._label_to_vertex[label]
        except KeyError:
            raise UnknownVertex("unknown vertex label %r" % (label,)) from None

    def vertex_label(self, v):
        return self.roots[0][v][0]

    def edge_vertices(self, e):
        """Vertex ids ``(a, b)`` of edge ``e`` in its stored orientation."""
        return self.simplex_vertices[1][e]

    def top_vertices(self, t):
        return self.simplex_vertices[self.n][t]

    def edge_at(self, t, p, q):
        """Edge between corners ``p`` and ``q`` of top simplex ``t``.

        Returns ``(edge_id, forward)`` where ``forward`` is True when the
        direction p -> q agrees with the edge's stored orientation.
        """
        mask = (1 << p) | (1 << q)
        _, e, perm = self.faces[t][mask]
        forward = perm == (0, 1)
        return e, forward if p < q else not forward

    def occurrence(self, k, sid):
        """Some ``(t, corners)`` realizing k-simplex ``sid`` inside top ``t``.

        ``corners`` lists the corner positions of ``t`` in the simplex's
        root order.
        """
        t, mask = self._first[k][sid]
        pos = [i for i in range(self.n + 1) if mask >> i & 1]
        _, _, perm = self.faces[t][mask]
        corners = [None] * len(pos)
        for i, r in enumerate(perm):
            corners[r] = pos[i]
        return t, corners

    def is_boundary_face(self, fid):
        return len(self.cofaces[fid]) == 1

    @property
    def is_closed(self):
        return all(len(c) == 2 for c in self.cofaces)

    def boundary_faces(self):
        return [f for f, c in enumerate(self.cofaces) if len(c) == 1]

    def top_simplices(self):
        """Root label tuples of the top simplices."""
        return list(self.roots[self.n])

    def __repr__(self):
        sizes = ", ".join(str(len(r)) for r in self.roots)
        return "SimplicialComplex(n=%d, sizes=[%s])" % (self.n, sizes)


def _canonical_gluing(a, b):
    """Order a gluing pair so equal gluings compare equal."""
    pairs = sorted(zip(a, b))
    left = tuple(p[0] for p in pairs)
    right = tuple(p[1] for p in pairs)
    alt = sorted(zip(right, left))
    alt_left = tuple(p[0] for p in alt)
    alt_right = tuple(p[1] for p in alt)
    return min((left, right), (alt_left, alt_right))


def build_complex(top_simplices, n=None, gluings=()):
    """Build a complex from top simplices and optional face gluings.

    Parameters
    ----------
    top_simplices : sequence of sequence of int
        Each entry lists the ``n + 1`` distinct labels of one top simplex.
    n : int, optional
        Dimension; inferred from the first simplex when omitted.
    gluings : sequence of (sequence, sequence)
        Pairs ``(A, B)`` of label tuples naming two (n-1)-faces; ``A[i]`` is
        identified with ``B[i]``.

    Returns
    -------
    SimplicialComplex

    Raises
    ------
    MalformedInput
        Bad arity, repeated labels, duplicate simplices or dangling gluings.
    NonManifold
        An (n-1)-simplex with more than two cofaces, or (for n <= 3) a vertex
        with a disconnected link.
    """
    tops = [tuple(int(x) for x in s) for s in top_simplices]
    if not tops:
        raise MalformedInput("complex needs at least one top simplex")
    if n is None:
        n = len(tops[0]) - 1
    if n < 1:
        raise MalformedInput("dimension must be at least 1")
    seen = set()
    for s in tops:
        if len(s) != n + 1:
            raise MalformedInput("simplex %s does not have %d vertices" % (s, n + 1))
        if len(set(s)) != len(s):
            raise MalformedInput("simplex %s repeats a label" % (s,))
        key = tuple(sorted(s))
        if key in seen:
            raise MalformedInput("simplex %s declared twice" % (s,))
        seen.add(key)

    nodes = set()
    for s in seen:
        for k in range(1, n + 2):
            nodes.update(combinations(s, k))
    uf = _PermUnionFind(nodes)

    canon = []
    for a, b in gluings:
        a = tuple(int(x) for x in a)
        b = tuple(int(x) for x in b)
        if len(a) != n or len(b) != n:
            raise MalformedInput("gluing %s ~ %s must name two %d-faces" % (a, b, n - 1))
        if len(set(a)) != n or len(set(b)) != n:
            raise MalformedInput("gluing %s ~ %s repeats a label" % (a, b))
        for face in (a, b):
            if tuple(sorted(face)) not in nodes:
                raise MalformedInput("gluing references undeclared face %s" % (face,))
        if sorted(a) == sorted(b):
            raise MalformedInput("gluing %s ~ %s glues a face to itself" % (a, b))
        canon.append(_canonical_gluing(a, b))
        for k in range(1, n + 1):
            for pos in combinations(range(n), k):
                sa, oa = _sorted_with_positions([a[i] for i in pos])
                sb, ob = _sorted_with_positions([b[i] for i in pos])
                # sorted position i of sa holds a[pos[oa[i]]] <-> b[pos[oa[i]]]
                inv_b = {j: r for r, j in enumerate(ob)}
                corr = tuple(inv_b[oa[i]] for i in range(k))
                uf.union(sa, sb, corr)

    roots = [sorted({uf.find(nd)[0] for nd in nodes if len(nd) == k + 1}) for k in range(n + 1)]
    cx = SimplicialComplex(n, roots, uf, tuple(sorted(set(canon))))
    _check_manifold(cx)
    return cx


def _check_manifold(cx):
    n = cx.n
    for fid, cof in enumerate(cx.cofaces):
        if len(cof) > 2:
            raise NonManifold(
                "%d-simplex %s has %d cofaces" % (n - 1, cx.roots[n - 1][fid], len(cof))
            )
    if n > 3:
        return
    # vertex links: corners (t, p) joined across shared (n-1)-faces
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for fid, cof in enumerate(cx.cofaces):
        if len(cof) != 2:
            continue
        corner_of_root = []
        for t, mask in cof:
            pos = [i for i in range(n + 1) if mask >> i & 1]
            _, _, perm = cx.faces[t][mask]
            m = {perm[i]: pos[i] for i in range(len(pos))}
            corner_of_root.append({r: (t, p) for r, p in m.items()})
        for r in range(n):
            x, y = find(corner_of_root[0][r]), find(corner_of_root[1][r])
            if x != y:
                parent[x] = y
    comps = {}
    for t in range(cx.num_tops):
        for p, v in enumerate(cx.top_vertices(t)):
            comps.setdefault(v, set()).add(find((t, p)))
    for v, c in comps.items():
        if len(c) > 1:
            raise NonManifold("link of vertex %r is disconnected" % (cx.vertex_label(v),))


def enumerate_hinges(cx):
    """One :class:`Hinge` per interior (n-1)-simplex, in face-id order."""
    full = (1 << (cx.n + 1)) - 1
    hinges = []
    for fid, cof in enumerate(cx.cofaces):
        if len(cof) != 2:
            continue
        (t1, m1), (t2, m2) = cof
        p1 = (full & ~m1).bit_length() - 1
        p2 = (full & ~m2).bit_length() - 1
        hinges.append(
            Hinge(
                face=fid,
                apexes=(cx.top_vertices(t1)[p1], cx.top_vertices(t2)[p2]),
                cofaces=(t1, t2),
                corners=(p1, p2),
            )
        )
    return hinges


def vertex_star(cx, label):
    """All simplices containing the vertex named by ``label``.

    Returns a set of ``(dimension, id)`` pairs.
    """
    v = cx.vertex_of(label)
    return {
        (k, i)
        for k in range(cx.n + 1)
        for i, verts in enumerate(cx.simplex_vertices[k])
        if v in verts
    }
