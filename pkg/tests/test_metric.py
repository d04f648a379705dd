import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dualtri.complex import build_complex
from dualtri.errors import LoopObstruction, ValidationError
from dualtri.fixtures import paper_torus, random_surface
from dualtri.metric import (
    DualityMetric,
    EuclideanMetric,
    ThurstonMetric,
    WeightedMetric,
    as_duality,
    as_weighted,
    cayley_menger_volume2,
    check_compatibility,
    duality_to_weighted,
    loop_residuals,
    thurston_to_weighted,
    validate_metric,
    weighted_to_duality,
    weighted_to_thurston,
)

TRI = build_complex([(1, 2, 3)])


def test_cayley_menger_equilateral():
    L = np.ones((3, 3)) - np.eye(3)
    assert np.isclose(cayley_menger_volume2(L), 3 / 16)


def test_cayley_menger_regular_tetrahedron():
    L = np.ones((4, 4)) - np.eye(4)
    assert np.isclose(np.sqrt(cayley_menger_volume2(L)), 1 / (6 * np.sqrt(2)))


@pytest.mark.parametrize("lengths", [[1, 1, 2], [1, 1, 3], [1, 1, -1]])
def test_degenerate_or_impossible_triangles(lengths):
    with pytest.raises(ValidationError) as info:
        validate_metric(EuclideanMetric(TRI, np.array(lengths, dtype=float)))
    assert info.value.invariant == "euclidean"


def test_incompatible_local_lengths():
    d = np.array([[0.5, 0.5], [0.5, 0.5], [0.2, 0.8]])
    with pytest.raises(ValidationError) as info:
        validate_metric(DualityMetric(TRI, d))
    assert info.value.invariant == "compatibility"
    assert info.value.simplex == (2, 0)


def test_thurston_constraint():
    with pytest.raises(ValidationError) as info:
        validate_metric(ThurstonMetric(TRI, np.zeros(3), np.array([1.0, -1.0, -1.0])))
    assert info.value.invariant == "c_lt_wsum"


def test_local_lengths_from_weights():
    m = WeightedMetric(build_complex([(1, 2)]), np.array([2.0]), np.array([1.0, 0.0]))
    dm = weighted_to_duality(m)
    assert np.allclose(dm.d[0], [1.25, 0.75])
    assert np.isclose(dm.d[0, 0] ** 2 - dm.d[0, 1] ** 2, 1.0)


@settings(max_examples=60, deadline=None)
@given(
    st.floats(0.2, 3.0),
    st.floats(-1.0, 1.0),
    st.floats(-1.0, 1.0),
)
def test_local_length_identities(ell, wa, wb):
    m = WeightedMetric(build_complex([(1, 2)]), np.array([ell]), np.array([wa, wb]))
    d = weighted_to_duality(m).d[0]
    assert np.isclose(d.sum(), ell)
    assert np.isclose(d[0] ** 2 - d[1] ** 2, wa - wb)


def _surface(seed, spread=0.3):
    return random_surface(v=14, weight_spread=spread, flips=4, seed=seed).metric


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_weighted_thurston_round_trip(seed):
    m = _surface(seed)
    back = thurston_to_weighted(weighted_to_thurston(m))
    assert np.allclose(back.lengths, m.lengths, rtol=1e-12, atol=0)
    assert np.allclose(back.weights, m.weights, rtol=0, atol=1e-12)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.floats(-0.2, 0.2))
def test_weighted_duality_round_trip_up_to_constant(seed, shift):
    m = _surface(seed)
    w = duality_to_weighted(weighted_to_duality(m), w0=shift).weights
    diff = w - m.weights
    assert np.ptp(diff) < 1e-10
    assert np.allclose(weighted_to_duality(WeightedMetric(m.complex, m.lengths, w)).d,
                       weighted_to_duality(m).d, atol=1e-10)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.floats(-1.0, 1.0))
def test_global_weight_shift_leaves_local_lengths(seed, c):
    m = _surface(seed)
    shifted = WeightedMetric(m.complex, m.lengths, m.weights + c)
    assert np.allclose(weighted_to_duality(shifted).d, weighted_to_duality(m).d, atol=1e-12)


def test_compatibility_of_converted_weights():
    dm = weighted_to_duality(_surface(3))
    rep = check_compatibility(dm)
    assert rep.passed
    assert rep.worst < 1e-12


def test_base_vertex_is_pinned():
    m = _surface(5)
    lab = m.complex.vertex_label(3)
    w = duality_to_weighted(weighted_to_duality(m), base_vertex=lab, w0=0.7).weights
    assert w[3] == pytest.approx(0.7)


def test_paper_torus_loop_obstruction():
    dm = paper_torus(0.1).metric
    assert check_compatibility(dm).passed
    _, res, _ = loop_residuals(dm)
    assert max(abs(x) for x in res.values()) == pytest.approx(0.8, abs=1e-12)
    with pytest.raises(LoopObstruction) as info:
        as_weighted(dm)
    assert info.value.residual == pytest.approx(0.8, abs=1e-12)


def test_paper_torus_symmetric_split_has_no_obstruction():
    dm = paper_torus(0.5).metric
    w = as_weighted(dm)
    assert np.allclose(w.weights, 0.0)


def test_as_duality_is_identity_on_duality():
    dm = paper_torus(0.2).metric
    assert as_duality(dm) is dm
