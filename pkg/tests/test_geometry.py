import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import local_matrix, metric_from_points, planar_hinge
from dualtri.complex import enumerate_hinges
from dualtri.errors import Degenerate
from dualtri.fixtures import (
    flat_torus_grid,
    icosahedron_boundary,
    random_surface,
    sphere_packing_s3,
    tetrahedron_boundary,
)
from dualtri.geometry import (
    center_offset_2d,
    compute_center,
    compute_geometry,
    embed_hinge,
    embed_lengths,
    perpendicularity_residuals,
    signed_distance,
    total_volume_check,
)
from dualtri.metric import weighted_to_duality
from dualtri.regularity import is_m_central

SQ3 = np.sqrt(3.0)


def test_equilateral_center_and_weight():
    pts = np.array([(0.0, 0.0), (1.0, 0.0), (0.5, SQ3 / 2)])
    c = compute_center(pts, weights=np.zeros(3))
    assert np.allclose(c.point, (0.5, SQ3 / 6))
    assert c.weight == pytest.approx(1 / 3)


def test_weighted_edge_center():
    pts = np.array([(0.0,), (2.0,)])
    c = compute_center(pts, weights=[1.0, 0.0])
    assert c.point[0] == pytest.approx(1.25)


def test_center_from_local_lengths_matches_weights(rng):
    pts = rng.standard_normal((4, 3))
    w = rng.uniform(-0.2, 0.2, 4)
    by_w = compute_center(pts, weights=w)
    by_d = compute_center(pts, local=local_matrix(pts, w))
    assert np.allclose(by_w.point, by_d.point)
    # local gauge puts corner 0 at weight 0
    assert by_d.weight == pytest.approx(by_w.weight + w[0])
    assert np.abs(perpendicularity_residuals(pts, local_matrix(pts, w), by_w.point)).max() < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-0.3, 0.3), min_size=3, max_size=3), st.integers(0, 1000))
def test_power_is_equal_at_center(w, seed):
    pts = np.random.default_rng(seed).standard_normal((3, 2))
    if abs(np.linalg.det(np.c_[pts, np.ones(3)])) < 1e-3:
        return
    c = compute_center(pts, weights=w)
    powers = ((pts - c.point) ** 2).sum(1) - np.asarray(w)
    assert np.allclose(powers, c.weight)


def test_obtuse_triangle_center_is_outside():
    # lengths 1, 1, 1.9: apex angle is obtuse
    cos = (1 + 1 - 1.9**2) / 2
    pts = np.array([(0.0, 0.0), (1.0, 0.0), (cos, np.sqrt(1 - cos**2))])
    m = metric_from_points([(1, 2, 3)], dict(zip((1, 2, 3), pts)))
    geo = compute_geometry(m)
    c = compute_center(pts, weights=np.zeros(3)).point
    # long edge is from corner 2 to corner 3
    assert signed_distance(pts, [1, 2], 0, c) < 0
    assert is_m_central(geo, 1)[0]
    ok, bad = is_m_central(geo, 2)
    assert not ok and bad == [(2, 0)]


def test_closed_form_offset_matches_embedding(rng):
    for _ in range(20):
        P = np.array([(0.0, 0.0), (1.3, 0.0), (rng.uniform(-1, 2), rng.uniform(0.2, 1.5))])
        w = rng.uniform(-0.1, 0.1, 3)
        D = local_matrix(P, w)
        c = compute_center(P, weights=w).point
        L = np.linalg.norm(P[:, None] - P[None], axis=2)
        h = center_offset_2d(D[0, 1], D[0, 2], L[0, 1], L[0, 2], L[1, 2])
        assert h == pytest.approx(c[1])


def test_embed_lengths_reproduces_distances(rng):
    pts = rng.standard_normal((4, 3))
    L = np.linalg.norm(pts[:, None] - pts[None], axis=2)
    emb = embed_lengths(L)
    assert np.allclose(np.linalg.norm(emb[:, None] - emb[None], axis=2), L)


def test_embed_lengths_rejects_flat_triangle():
    L = np.array([[0, 1, 2], [1, 0, 1], [2, 1, 0]], dtype=float)
    with pytest.raises(Degenerate):
        embed_lengths(L)


def test_right_triangle_dual_volumes():
    pts = {1: (0.0, 0.0), 2: (3.0, 0.0), 3: (0.0, 3.0)}
    geo = compute_geometry(metric_from_points([(1, 2, 3)], pts))
    # hypotenuse center lies on the edge; legs have dual length 1.5
    duals = {geo.complex.roots[1][e]: geo.dual_volumes[1][e] for e in range(3)}
    assert duals[(2, 3)] == pytest.approx(0.0, abs=1e-12)
    assert duals[(1, 2)] == pytest.approx(1.5)
    assert duals[(1, 3)] == pytest.approx(1.5)
    assert geo.dual_volumes[0].sum() == pytest.approx(4.5)


def test_tetrahedron_boundary_volumes():
    geo = compute_geometry(tetrahedron_boundary().metric)
    assert geo.volumes[2] == pytest.approx([SQ3 / 4] * 4)
    assert geo.dual_volumes[1] == pytest.approx([1 / SQ3] * 6)
    assert geo.dual_volumes[0] == pytest.approx([SQ3 / 4] * 4)


def test_hinge_dual_length_matches_geometry():
    doc = random_surface(v=12, weight_spread=0.3, flips=4, seed=2)
    geo = compute_geometry(doc.metric)
    dm = weighted_to_duality(doc.metric)
    for h in enumerate_hinges(doc.complex):
        emb = embed_hinge(dm, h)
        assert emb.dual_length() == pytest.approx(geo.hinge_margin(h.face), abs=1e-12)


def test_planar_hinge_shares_face_coordinates():
    P = np.array([(0, 0), (1, 0), (0.4, 0.7), (0.7, -0.5)], dtype=float)
    emb = planar_hinge(P)
    assert np.allclose(emb.coords, P)


@pytest.mark.parametrize(
    "doc",
    [
        flat_torus_grid(4),
        tetrahedron_boundary(),
        icosahedron_boundary(),
        random_surface(v=25, weight_spread=0.4, seed=1),
        sphere_packing_s3(seed=2),
    ],
    ids=["torus", "tetrahedron", "icosahedron", "random", "s3"],
)
def test_volume_identity_and_consistent_frames(doc):
    geo = compute_geometry(doc.metric)
    rep = total_volume_check(geo)
    assert rep.closed and rep.passed
    assert geo.frame_mismatch() < 1e-9
    assert geo.perp_residual < 1e-9


def test_flat_torus_volume_is_one():
    geo = compute_geometry(flat_torus_grid(5).metric)
    assert geo.volumes[2].sum() == pytest.approx(1.0)
    assert geo.dual_volumes[0] == pytest.approx([1 / 25] * 25)


def test_sphere_packing_dual_volume_sum_in_three_dimensions():
    geo = compute_geometry(sphere_packing_s3(seed=4).metric)
    assert geo.complex.n == 3
    rep = total_volume_check(geo)
    assert rep.passed
