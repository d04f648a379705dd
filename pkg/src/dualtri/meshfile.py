"""Plain-text mesh documents.

Example (the one-vertex torus with local lengths)::

    dualtri 1
    dimension 2
    kind duality
    vertices 1
    simplex 1 2 3
    simplex 1 2 4
    glue 1 3 : 4 2
    glue 2 3 : 4 1
    edge 0 1 2
    edge 1 1 3
    edge 2 1 4
    dloc 0 0.10000000000000001 0.90000000000000002
    ...
    f 1 0.5

``simplex`` lines list integer labels, ``glue A : B`` identifies two faces
label by label. Edge ids are fixed by the complex (sorted root label
tuples); ``edge`` lines restate them so that ``len``, ``c`` and ``dloc``
lines are unambiguous, ``dloc e x y`` giving the local length at the first
and at the second declared endpoint. ``weight`` and ``f`` lines name a
vertex by any of its labels. ``#`` starts a comment.

Floats are written with 17 significant digits, so write -> parse -> write is
byte-stable.
"""
import numpy as np

from .complex import build_complex
from .errors import (
    MalformedInput,
    MissingLength,
    MissingLocalLength,
    NonManifold,
    ParseError,
    UnknownVertex,
    ValidationError,
)
from .metric import DualityMetric, EuclideanMetric, ThurstonMetric, WeightedMetric, validate_metric

__all__ = ["MeshDocument", "parse_mesh", "write_mesh", "read_mesh", "format_float"]

FORMAT_VERSION = 1
KINDS = ("euclidean", "weighted", "thurston", "duality")


def format_float(x):
    return "%.17g" % x


class MeshDocument:
    """Parsed document: complex, metric and optional vertex function."""

    def __init__(self, complex, metric, f=None):
        self.complex = complex
        self.metric = metric
        self.f = f

    def __iter__(self):
        return iter((self.complex, self.metric, self.f))

    def text(self):
        return write_mesh(self.complex, self.metric, self.f)


class _Line:
    def __init__(self, number, text):
        self.number = number
        self.text = text
        self.tokens = []
        col = 0
        for tok in text.split():
            col = text.index(tok, col)
            self.tokens.append((tok, col + 1))
            col += len(tok)

    def error(self, message, index=None):
        col = self.tokens[index][1] if index is not None and index < len(self.tokens) else None
        return ParseError(message, self.number, col)

    def int(self, i):
        try:
            return int(self.tokens[i][0])
        except IndexError:
            raise self.error("missing field %d" % (i + 1)) from None
        except ValueError:
            raise self.error("expected an integer, got %r" % self.tokens[i][0], i) from None

    def float(self, i):
        try:
            x = float(self.tokens[i][0])
        except IndexError:
            raise self.error("missing field %d" % (i + 1)) from None
        except ValueError:
            raise self.error("expected a number, got %r" % self.tokens[i][0], i) from None
        if not np.isfinite(x):
            raise self.error("value must be finite", i)
        return x

    def arity(self, n):
        if len(self.tokens) != n:
            raise self.error("%s takes %d fields, got %d" % (self.tokens[0][0], n - 1, len(self.tokens) - 1))


def _lines(text):
    for number, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].rstrip()
        if body.strip():
            yield _Line(number, body)


def parse_mesh(text, validate=True):
    """Parse a document.

    Returns
    -------
    MeshDocument
        Unpacks as ``(complex, metric, f)``.

    Raises
    ------
    ParseError
        Syntax problems, with line and column.
    ValidationError
        Well-formed documents whose content violates an invariant.
    """
    lines = list(_lines(text))
    if not lines or lines[0].tokens[0][0] != "dualtri":
        raise ParseError("missing 'dualtri' header", lines[0].number if lines else 1, 1)
    head = lines[0]
    head.arity(2)
    if head.int(1) != FORMAT_VERSION:
        raise head.error("unsupported format version %s" % head.tokens[1][0], 1)

    dim = kind = nverts = None
    simplices, gluings, edges = [], [], {}
    lens, weights, cs, dlocs, fvals = {}, {}, {}, {}, {}

    def once(table, key, value, line, what):
        if key in table:
            raise line.error("duplicate %s for %s" % (what, key), 1)
        table[key] = (value, line)

    for line in lines[1:]:
        kw = line.tokens[0][0]
        if kw == "dimension":
            line.arity(2)
            dim = line.int(1)
            if dim < 1:
                raise line.error("dimension must be positive", 1)
        elif kw == "kind":
            line.arity(2)
            kind = line.tokens[1][0]
            if kind not in KINDS:
                raise line.error("unknown kind %r" % kind, 1)
        elif kw == "vertices":
            line.arity(2)
            nverts = line.int(1)
        elif kw == "simplex":
            if dim is None:
                raise line.error("simplex before dimension")
            line.arity(dim + 2)
            simplices.append((tuple(line.int(i) for i in range(1, dim + 2)), line))
        elif kw == "glue":
            if dim is None:
                raise line.error("glue before dimension")
            line.arity(2 * dim + 2)
            if line.tokens[dim + 1][0] != ":":
                raise line.error("expected ':' between glued faces", dim + 1)
            a = tuple(line.int(i) for i in range(1, dim + 1))
            b = tuple(line.int(i) for i in range(dim + 2, 2 * dim + 2))
            gluings.append(((a, b), line))
        elif kw == "edge":
            line.arity(4)
            once(edges, line.int(1), (line.int(2), line.int(3)), line, "edge")
        elif kw == "len":
            line.arity(3)
            once(lens, line.int(1), line.float(2), line, "len")
        elif kw == "weight":
            line.arity(3)
            once(weights, line.int(1), line.float(2), line, "weight")
        elif kw == "c":
            line.arity(3)
            once(cs, line.int(1), line.float(2), line, "c")
        elif kw == "dloc":
            line.arity(4)
            once(dlocs, line.int(1), (line.float(2), line.float(3)), line, "dloc")
        elif kw == "f":
            line.arity(3)
            once(fvals, line.int(1), line.float(2), line, "f")
        else:
            raise line.error("unknown keyword %r" % kw, 0)

    for name, value in (("dimension", dim), ("kind", kind), ("vertices", nverts)):
        if value is None:
            raise ParseError("missing '%s' line" % name, lines[-1].number)
    if not simplices:
        raise ParseError("no simplex lines", lines[-1].number)

    try:
        cx = build_complex([s for s, _ in simplices], n=dim, gluings=[g for g, _ in gluings])
    except (MalformedInput, NonManifold) as exc:
        raise ValidationError(str(exc), invariant="complex") from None
    if cx.num_vertices != nverts:
        raise ValidationError(
            "document declares %d vertices, complex has %d" % (nverts, cx.num_vertices),
            invariant="vertex_count",
        )
    for e, ((a, b), line) in edges.items():
        if not 0 <= e < cx.num_edges or cx.roots[1][e] != (a, b):
            raise ValidationError(
                "line %d: edge %d is not (%d, %d) in canonical order" % (line.number, e, a, b),
                invariant="edge_declaration",
                simplex=(1, e),
            )

    def per_edge(table, width, missing, what):
        for e, (_, line) in table.items():
            if not 0 <= e < cx.num_edges:
                raise line.error("unknown edge %d" % e, 1)
        out = np.zeros((cx.num_edges, width))
        for e in range(cx.num_edges):
            if e not in table:
                raise missing("no %s for edge %d" % (what, e), invariant="missing_" + what, simplex=(1, e))
            out[e] = table[e][0]
        return out[:, 0] if width == 1 else out

    def per_vertex(table, what, required=True):
        out = np.zeros(cx.num_vertices)
        seen = set()
        for lab, (value, line) in table.items():
            try:
                v = cx.vertex_of(lab)
            except UnknownVertex:
                raise line.error("unknown vertex label %d" % lab, 1) from None
            if v in seen:
                raise line.error("second %s for vertex %d" % (what, cx.vertex_label(v)), 1)
            seen.add(v)
            out[v] = value
        if required and len(seen) != cx.num_vertices:
            v = min(set(range(cx.num_vertices)) - seen)
            raise ValidationError(
                "no %s for vertex %d" % (what, cx.vertex_label(v)),
                invariant="missing_" + what,
                simplex=(0, v),
            )
        return out

    if kind == "euclidean":
        metric = EuclideanMetric(cx, per_edge(lens, 1, MissingLength, "len"))
    elif kind == "weighted":
        metric = WeightedMetric(cx, per_edge(lens, 1, MissingLength, "len"), per_vertex(weights, "weight"))
    elif kind == "thurston":
        metric = ThurstonMetric(cx, per_vertex(weights, "weight"), per_edge(cs, 1, MissingLength, "c"))
    else:
        metric = DualityMetric(cx, per_edge(dlocs, 2, MissingLocalLength, "dloc"))
    unused = {
        "euclidean": (weights, cs, dlocs),
        "weighted": (cs, dlocs),
        "thurston": (lens, dlocs),
        "duality": (lens, weights, cs),
    }[kind]
    for table in unused:
        for _, line in table.values():
            raise line.error("%r lines do not belong to a %s document" % (line.tokens[0][0], kind), 0)

    f = per_vertex(fvals, "f") if fvals else None
    if validate:
        validate_metric(metric)
    return MeshDocument(cx, metric, f)


def read_mesh(path, validate=True):
    with open(path) as fh:
        return parse_mesh(fh.read(), validate)


def write_mesh(complex, metric, f=None):
    """Serialize in canonical order; the output does not depend on how the
    complex was constructed."""
    cx = complex
    out = [
        "dualtri %d" % FORMAT_VERSION,
        "dimension %d" % cx.n,
        "kind %s" % metric.kind,
        "vertices %d" % cx.num_vertices,
    ]
    for top in cx.roots[cx.n]:
        out.append("simplex " + " ".join(str(x) for x in top))
    for a, b in cx.gluings:
        out.append("glue %s : %s" % (" ".join(map(str, a)), " ".join(map(str, b))))
    for e, (a, b) in enumerate(cx.roots[1]):
        out.append("edge %d %d %d" % (e, a, b))
    ff = format_float
    if metric.kind in ("euclidean", "weighted"):
        for e, x in enumerate(metric.lengths):
            out.append("len %d %s" % (e, ff(x)))
    if metric.kind in ("weighted", "thurston"):
        for v, x in enumerate(metric.weights):
            out.append("weight %d %s" % (cx.vertex_label(v), ff(x)))
    if metric.kind == "thurston":
        for e, x in enumerate(metric.c):
            out.append("c %d %s" % (e, ff(x)))
    if metric.kind == "duality":
        for e, (x, y) in enumerate(metric.d):
            out.append("dloc %d %s %s" % (e, ff(x), ff(y)))
    if f is not None:
        for v, x in enumerate(f):
            out.append("f %d %s" % (cx.vertex_label(v), ff(x)))
    return "\n".join(out) + "\n"
