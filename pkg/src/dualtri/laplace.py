"""Discrete Laplacian built from dual volumes, and what it drives.

The matrix ``L`` is stored without the dual-volume normalization:
``L[i, j]`` sums ``|*e| / |e|`` over all edges ``e`` joining ``i`` and ``j``
and the diagonal is the negated row sum. Poisson problems use the measure
form ``L u = f V``; heat flow uses ``du/dt = V^{-1} L u``.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    IncompatibleRHS,
    NonpositiveDualVolume,
    RequiresZeroWeights,
    SingularBeyondConstants,
    UnstableStep,
)
from .geometry import triangle_area

__all__ = [
    "LaplaceSystem",
    "HeatTrajectory",
    "SemidefinitenessReport",
    "assemble_laplacian",
    "cotan_weights",
    "dirichlet_energy",
    "solve_poisson",
    "heat_evolve",
    "stability_bound",
    "envelope_violation",
    "entropy_lambda",
    "entropy_from_matrix",
    "hypothesis_tags",
    "check_semidefiniteness",
]


@dataclass(frozen=True)
class LaplaceSystem:
    """Assembled Laplacian.

    Attributes
    ----------
    L : scipy.sparse.csr_matrix
        Symmetric, zero row sums.
    V : ndarray
        Dual vertex volumes.
    coefficients : ndarray
        ``|*e| / |e|`` per edge id (loops included, though they do not
        enter ``L``).
    geometry : DualGeometry
    """

    L: sp.csr_matrix
    V: np.ndarray
    coefficients: np.ndarray
    geometry: object

    @property
    def complex(self):
        return self.geometry.complex

    @property
    def size(self):
        return self.L.shape[0]

    def dense(self):
        return self.L.toarray()


def assemble_laplacian(geometry):
    """Assemble the :class:`LaplaceSystem` of a dual geometry."""
    cx = geometry.complex
    nv = cx.num_vertices
    lengths = geometry.lengths
    coeff = geometry.dual_volumes[1] / lengths
    rows, cols, vals = [], [], []
    for e in range(cx.num_edges):
        a, b = cx.edge_vertices(e)
        if a == b:
            continue
        rows += [a, b]
        cols += [b, a]
        vals += [coeff[e], coeff[e]]
    off = sp.coo_matrix((vals, (rows, cols)), shape=(nv, nv)).tocsr()
    off.sum_duplicates()
    diag = -np.asarray(off.sum(axis=1)).ravel()
    L = (off + sp.diags(diag)).tocsr()
    return LaplaceSystem(L, np.array(geometry.dual_volumes[0]), coeff, geometry)


def _zero_weights(metric, tol=1e-12):
    d = metric.d
    return np.all(np.abs(d[:, 0] - d[:, 1]) <= tol * (d[:, 0] + d[:, 1]))


def cotan_weights(geometry, tol=1e-12):
    """Per-edge cotangent weights ``(cot a + cot b) / 2`` of a surface.

    Raises
    ------
    RequiresZeroWeights
        If the metric has nonuniform weights (some ``d_ij != d_ji``).
    """
    cx = geometry.complex
    if cx.n != 2:
        raise ValueError("cotangent weights are defined for surfaces")
    if not _zero_weights(geometry.dmetric, tol):
        raise RequiresZeroWeights("cotangent weights need d_ij = d_ji on every edge")
    lengths = geometry.lengths
    w = np.zeros(cx.num_edges)
    for t in range(cx.num_tops):
        edges = {}
        for r in range(3):
            p, q = [i for i in range(3) if i != r]
            edges[r] = cx.edge_at(t, p, q)[0]
        area = triangle_area(*(lengths[edges[r]] for r in range(3)))
        for r in range(3):
            opp = lengths[edges[r]]
            others = [lengths[edges[x]] for x in range(3) if x != r]
            cot = (others[0] ** 2 + others[1] ** 2 - opp**2) / (4 * area)
            w[edges[r]] += 0.5 * cot
    return w


def dirichlet_energy(system, f):
    """``1/2 sum_e (|*e| / |e|) (f_j - f_i)^2`` over all edges."""
    cx = system.complex
    f = np.asarray(f, dtype=float)
    total = 0.0
    for e in range(cx.num_edges):
        a, b = cx.edge_vertices(e)
        total += system.coefficients[e] * (f[b] - f[a]) ** 2
    return 0.5 * total


def solve_poisson(system, f, tol=1e-9):
    """Solve ``L u = f V`` with ``sum(u) = 0``.

    Raises
    ------
    IncompatibleRHS
        If ``sum f_i V_i`` is not zero relative to ``|f V|``.
    SingularBeyondConstants
        If the nullspace of ``L`` is larger than the constants.
    """
    f = np.asarray(f, dtype=float)
    rhs = f * system.V
    norm = np.linalg.norm(rhs)
    if abs(rhs.sum()) > tol * max(np.abs(rhs).sum(), 0.0) and norm > 0:
        raise IncompatibleRHS("sum f_i V_i = %.3g is not zero" % rhs.sum())
    n = system.size
    if norm == 0:
        return np.zeros(n)
    ones = np.ones((n, 1))
    aug = sp.bmat([[system.L, ones], [ones.T, None]], format="csc")
    try:
        lu = spla.splu(aug)
    except RuntimeError as exc:
        raise SingularBeyondConstants("Laplacian nullspace exceeds constants: %s" % exc) from None
    sol = lu.solve(np.append(rhs, 0.0))
    u = sol[:n]
    res = np.linalg.norm(system.L @ u - rhs)
    if not np.isfinite(res) or res > tol * norm:
        raise SingularBeyondConstants("residual %.3g after solve" % res)
    return u


def stability_bound(system, method="euler"):
    """Largest step keeping the update entrywise nonnegative."""
    a = np.abs(system.L.diagonal() / system.V).max()
    return (1.0 if method == "euler" else 2.0) / a


@dataclass
class HeatTrajectory:
    times: np.ndarray
    values: np.ndarray
    V: np.ndarray

    def mass(self):
        return self.values @ self.V

    def envelopes(self):
        return self.values.max(1), self.values.min(1)

    def monotone(self, tol=1e-12):
        hi, lo = self.envelopes()
        scale = max(np.abs(self.values[0]).max(), 1.0)
        return bool(np.all(np.diff(hi) <= tol * scale) and np.all(np.diff(lo) >= -tol * scale))


def heat_evolve(system, u0, t_end, dt=None, method="midpoint"):
    """Integrate ``du/dt = V^{-1} L u`` from ``u0`` up to ``t_end``.

    Parameters
    ----------
    method : {"midpoint", "euler"}
        Implicit midpoint is stable for every step; explicit Euler needs
        ``dt <= stability_bound(system)``. Both keep ``sum V_i u_i`` fixed.
    dt : float, optional
        Defaults to ``min(stability_bound(system, method), t_end / 100)``.
        Steps up to the bound keep maxima from growing and minima from
        shrinking when all coefficients are positive.

    Raises
    ------
    NonpositiveDualVolume
        If some ``V_i <= 0``.
    UnstableStep
        For explicit Euler beyond the stability bound.
    """
    V = system.V
    if np.any(V <= 0):
        raise NonpositiveDualVolume("dual vertex volume %d is not positive" % int(np.argmin(V)))
    bound = stability_bound(system, method)
    if dt is None:
        dt = min(bound, t_end / 100) if t_end > 0 else bound
    if dt <= 0:
        raise ValueError("dt must be positive")
    if method == "euler" and dt > bound * (1 + 1e-12):
        raise UnstableStep("dt = %g exceeds the explicit bound %g" % (dt, bound))
    steps = max(int(np.ceil(t_end / dt - 1e-12)), 1)
    h = t_end / steps if t_end > 0 else dt
    u = np.asarray(u0, dtype=float).copy()
    out = [u.copy()]
    D = sp.diags(V)
    if method == "midpoint":
        lhs = spla.splu((D - 0.5 * h * system.L).tocsc())
        rhs_op = (D + 0.5 * h * system.L).tocsr()
        for _ in range(steps):
            u = lhs.solve(rhs_op @ u)
            out.append(u.copy())
    elif method == "euler":
        for _ in range(steps):
            u = u + h * (system.L @ u) / V
            out.append(u.copy())
    else:
        raise ValueError("unknown method %r" % method)
    return HeatTrajectory(np.arange(steps + 1) * h, np.array(out), V)


def envelope_violation(system, dt=None, tol=1e-12):
    """Search vertex indicators for one explicit step that breaks the envelopes.

    Returns
    -------
    tuple or None
        ``(vertex, u0, u1)`` for the first violating indicator.
    """
    A = system.L.toarray() / system.V[:, None]
    if dt is None:
        dt = 1.0 / np.abs(np.diag(A)).max()
    n = system.size
    for i in range(n):
        u0 = np.zeros(n)
        u0[i] = 1.0
        u1 = u0 + dt * A @ u0
        if u1.max() > 1.0 + tol or u1.min() < -tol:
            return i, u0, u1
    return None


def _mean_zero_basis(n):
    return scipy.linalg.null_space(np.ones((1, n)))


def entropy_from_matrix(L):
    """Smallest value of ``-1/2 f^T L f`` over unit mean-zero ``f``."""
    L = L.toarray() if sp.issparse(L) else np.asarray(L, dtype=float)
    Q = _mean_zero_basis(L.shape[0])
    M = -0.5 * Q.T @ L @ Q
    return float(np.linalg.eigvalsh(0.5 * (M + M.T)).min())


def entropy_lambda(system):
    """Entropy: minimum Dirichlet energy on unit mean-zero functions."""
    return entropy_from_matrix(system.L)


def hypothesis_tags(system, tol=0.0):
    """Which sufficient conditions for semidefiniteness hold.

    ``dual_positive``: every interior edge has positive dual volume.
    ``local_positive``: a surface with all local lengths positive.
    ``sphere_packing``: a 3-manifold whose local lengths depend only on the
    corner they start from.
    """
    geo = system.geometry
    cx = geo.complex
    tags = []
    interior = [e for e in range(cx.num_edges) if cx.edge_vertices(e)[0] != cx.edge_vertices(e)[1]]
    if all(geo.dual_volumes[1][e] > tol for e in interior):
        tags.append("dual_positive")
    d = geo.dmetric.d
    if cx.n == 2 and np.all(d > tol):
        tags.append("local_positive")
    if cx.n == 3:
        radius = {}
        ok = True
        for e in range(cx.num_edges):
            for end, v in enumerate(cx.edge_vertices(e)):
                r = radius.setdefault(v, d[e, end])
                if abs(r - d[e, end]) > 1e-12 * max(abs(r), 1.0):
                    ok = False
        if ok:
            tags.append("sphere_packing")
    return tags


@dataclass(frozen=True)
class SemidefinitenessReport:
    eigenvalues: np.ndarray
    scale: float
    tol: float
    null_dim: int
    constant_null: bool
    hypotheses: tuple
    hypothesis: object = None

    @property
    def max_eigenvalue(self):
        return float(self.eigenvalues.max())

    @property
    def passed(self):
        return (
            self.max_eigenvalue <= self.tol * self.scale
            and self.null_dim == 1
            and self.constant_null
        )

    @property
    def hypothesis_holds(self):
        if self.hypothesis is None:
            return bool(self.hypotheses)
        return self.hypothesis in self.hypotheses


def check_semidefiniteness(system, hypothesis=None, tol=1e-9):
    """Check that ``L`` is negative semidefinite with constant nullspace.

    Parameters
    ----------
    hypothesis : str, optional
        Tag from :func:`hypothesis_tags` the caller relies on; the report
        records whether it actually holds.
    """
    L = system.dense()
    scale = float(np.abs(np.diag(L)).max())
    vals, vecs = np.linalg.eigh(L)
    near = np.abs(vals) <= tol * scale
    null_dim = int(near.sum())
    constant = False
    if null_dim == 1:
        v = vecs[:, np.argmax(near)]
        constant = bool(np.abs(v - v.mean()).max() <= 1e-6)
    return SemidefinitenessReport(
        vals, scale, tol, null_dim, constant, tuple(hypothesis_tags(system)), hypothesis
    )
