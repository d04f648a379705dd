import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import metric_from_points
from dualtri.complex import build_complex
from dualtri.errors import IncompatibleRHS, NonpositiveDualVolume, RequiresZeroWeights, UnstableStep
from dualtri.fixtures import (
    flat_torus_grid,
    icosahedron_boundary,
    paper_torus,
    random_surface,
    sphere_packing_s3,
    tetrahedron_boundary,
)
from dualtri.geometry import compute_geometry
from dualtri.laplace import (
    assemble_laplacian,
    check_semidefiniteness,
    cotan_weights,
    dirichlet_energy,
    entropy_lambda,
    envelope_violation,
    heat_evolve,
    hypothesis_tags,
    solve_poisson,
    stability_bound,
)
from dualtri.metric import DualityMetric


def _system(doc):
    return assemble_laplacian(compute_geometry(doc.metric))


TET = _system(tetrahedron_boundary())
THIN_TRI = {1: (0.0, 0.0), 2: (1.0, 0.0), 3: (0.5, 0.1)}


def test_tetrahedron_matrix():
    L = TET.dense()
    off = L[~np.eye(4, dtype=bool)]
    assert off == pytest.approx([1 / np.sqrt(3)] * 12)
    assert np.diag(L) == pytest.approx([-np.sqrt(3)] * 4)
    assert entropy_lambda(TET) == pytest.approx(2 / np.sqrt(3))
    assert dirichlet_energy(TET, [1, 0, 0, 0]) == pytest.approx(np.sqrt(3) / 2)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_matrix_invariants(seed):
    system = _system(random_surface(v=14, weight_spread=0.4, flips=6, seed=seed))
    L = system.dense()
    assert np.array_equal(L, L.T)
    assert np.abs(L.sum(1)).max() <= 1e-12 * np.abs(L).max()
    f = np.random.default_rng(seed).standard_normal(system.size)
    assert dirichlet_energy(system, f) == pytest.approx(-0.5 * f @ L @ f, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_cotangent_formula(seed):
    system = _system(random_surface(v=20, flips=8, seed=seed))
    cot = cotan_weights(system.geometry)
    assert np.abs(system.coefficients - cot).max() <= 1e-12 * max(1.0, np.abs(cot).max())


def test_cotangent_formula_needs_zero_weights():
    geo = compute_geometry(random_surface(v=10, weight_spread=0.5, seed=1).metric)
    with pytest.raises(RequiresZeroWeights):
        cotan_weights(geo)


def test_torus_rows_and_loops():
    system = _system(flat_torus_grid(3))
    assert np.abs(system.dense().sum(1)).max() < 1e-12
    # sparsity follows adjacency, even where a coefficient vanishes
    assert system.L[0].nnz == 7
    # loops at the single vertex do not enter the matrix
    one = assemble_laplacian(compute_geometry(paper_torus(0.1).metric))
    assert one.dense() == pytest.approx(np.zeros((1, 1)))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31))
def test_single_triangle_block(seed):
    rng = np.random.default_rng(seed)
    cx = build_complex([(1, 2, 3)])
    # all d > 0: weights small compared with the edges
    pts = dict(zip((1, 2, 3), rng.uniform(-1, 1, (3, 2))))
    m = metric_from_points([(1, 2, 3)], pts, dict(zip((1, 2, 3), rng.uniform(-0.01, 0.01, 3))))
    L = m.lengths
    if L.min() < 0.2:
        return
    geo = compute_geometry(m)
    if geo.volumes[2][0] < 0.05 or geo.dmetric.d.min() <= 0:
        return
    M = assemble_laplacian(geo).dense()
    assert np.all(np.diag(M) < 0)
    assert np.linalg.det(M[:2, :2]) > 0
    assert cx.count(2) == 1


def test_poisson_compatible_and_incompatible():
    f = np.array([1.0, -1.0, 0.0, 0.0]) / TET.V
    u = solve_poisson(TET, f)
    assert np.linalg.norm(TET.L @ u - f * TET.V) <= 1e-9 * np.linalg.norm(f * TET.V)
    assert abs(u.sum()) < 1e-12
    with pytest.raises(IncompatibleRHS):
        solve_poisson(TET, np.ones(4))


@pytest.mark.parametrize("seed", range(3))
def test_poisson_on_random_surface(seed):
    system = _system(random_surface(v=30, weight_spread=0.3, seed=seed))
    rhs = np.random.default_rng(seed).standard_normal(system.size)
    rhs -= (rhs @ system.V) / system.V.sum()
    u = solve_poisson(system, rhs)
    assert np.linalg.norm(system.L @ u - rhs * system.V) <= 1e-9 * np.linalg.norm(rhs * system.V)


@pytest.mark.parametrize("method", ["midpoint", "euler"])
def test_heat_conserves_mass_and_envelopes(method):
    system = _system(icosahedron_boundary())
    u0 = np.random.default_rng(0).uniform(0, 1, system.size)
    traj = heat_evolve(system, u0, 1.0, method=method)
    mass = traj.mass()
    assert np.abs(mass - mass[0]).max() <= 1e-9 * abs(mass[0])
    assert traj.monotone()
    assert np.ptp(traj.values[-1]) < np.ptp(u0)


def test_heat_midpoint_step_count():
    traj = heat_evolve(TET, [1, 0, 0, 0], 2.0, dt=0.1)
    assert len(traj.times) == 21
    assert traj.values[-1] == pytest.approx([0.25] * 4, abs=1e-3)


def test_euler_beyond_bound_is_refused():
    bound = stability_bound(TET, "euler")
    with pytest.raises(UnstableStep):
        heat_evolve(TET, [1, 0, 0, 0], 1.0, dt=1.01 * bound, method="euler")
    assert envelope_violation(TET) is None
    assert envelope_violation(TET, dt=2 * bound) is not None


def test_heat_needs_positive_dual_volumes():
    system = assemble_laplacian(compute_geometry(metric_from_points([(1, 2, 3)], THIN_TRI)))
    flipped = type(system)(system.L, system.V * np.array([1, -1, 1]), system.coefficients, system.geometry)
    with pytest.raises(NonpositiveDualVolume):
        heat_evolve(flipped, [1, 0, 0], 1.0)


@pytest.mark.parametrize(
    "doc, tag",
    [
        (tetrahedron_boundary(), "dual_positive"),
        (random_surface(v=25, weight_spread=0.4, flips=25, seed=4), "local_positive"),
        (sphere_packing_s3(seed=1), "sphere_packing"),
    ],
)
def test_semidefinite_under_each_hypothesis(doc, tag):
    system = _system(doc)
    rep = check_semidefiniteness(system, hypothesis=tag)
    assert rep.hypothesis_holds
    assert rep.passed, rep.max_eigenvalue


def test_symmetric_local_lengths_on_a_tetrahedron():
    cx = build_complex([(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)])
    system = assemble_laplacian(compute_geometry(DualityMetric(cx, np.full((6, 2), 0.5))))
    assert "local_positive" in hypothesis_tags(system)
    assert check_semidefiniteness(system).passed
    assert system.dense() == pytest.approx(TET.dense())
