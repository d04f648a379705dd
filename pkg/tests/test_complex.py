import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dualtri.complex import build_complex, enumerate_hinges, vertex_star
from dualtri.errors import MalformedInput, NonManifold

TET = list(itertools.combinations(range(1, 5), 3))


def torus_tops(k):
    def lab(i, j):
        return (i % k) * k + (j % k) + 1

    tops = []
    for i in range(k):
        for j in range(k):
            tops.append((lab(i, j), lab(i + 1, j), lab(i + 1, j + 1)))
            tops.append((lab(i, j), lab(i + 1, j + 1), lab(i, j + 1)))
    return tops


def test_tetrahedron_counts():
    cx = build_complex(TET)
    assert [cx.count(k) for k in range(3)] == [4, 6, 4]
    assert cx.euler_characteristic() == 2
    assert cx.is_closed
    assert cx.roots[1] == [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]


def test_every_interior_face_is_a_hinge():
    cx = build_complex(TET)
    hinges = enumerate_hinges(cx)
    assert len(hinges) == 6
    for h in hinges:
        a, b = cx.edge_vertices(h.face)
        assert {a, b}.isdisjoint(h.apexes)
        assert h.cofaces[0] != h.cofaces[1]


def test_open_hinge_has_boundary():
    cx = build_complex([(1, 2, 3), (1, 2, 4)])
    assert not cx.is_closed
    assert len(cx.boundary_faces()) == 4
    assert len(enumerate_hinges(cx)) == 1


@pytest.mark.parametrize("k", [3, 4, 5])
def test_torus_grid_euler_characteristic(k):
    cx = build_complex(torus_tops(k))
    assert cx.euler_characteristic() == 0
    assert cx.num_vertices == k * k


def test_one_vertex_torus_by_gluing():
    cx = build_complex([(1, 2, 3), (1, 2, 4)], gluings=[((1, 3), (4, 2)), ((3, 2), (1, 4))])
    assert [cx.count(k) for k in range(3)] == [1, 3, 2]
    assert cx.euler_characteristic() == 0
    assert cx.is_closed
    for e in range(3):
        a, b = cx.edge_vertices(e)
        assert a == b == 0


def test_three_triangles_on_an_edge_is_rejected():
    with pytest.raises(NonManifold):
        build_complex([(1, 2, 3), (1, 2, 4), (1, 2, 5)])


@pytest.mark.parametrize("tops", [[(1, 1, 2)], [(1, 2, 3), (1, 2, 3, 4)]])
def test_malformed_simplices(tops):
    with pytest.raises(MalformedInput):
        build_complex(tops)


def test_vertex_star_of_tetrahedron_vertex():
    cx = build_complex(TET)
    star = vertex_star(cx, 1)
    # three edges and three triangles contain vertex 1, plus itself
    assert sorted(k for k, _ in star) == [0, 1, 1, 1, 2, 2, 2]


def test_sixteen_cell_is_a_three_sphere():
    tops = [tuple(2 * i + 1 + s[i] for i in range(4)) for s in itertools.product((0, 1), repeat=4)]
    cx = build_complex(tops)
    assert [cx.count(k) for k in range(4)] == [8, 24, 32, 16]
    assert cx.euler_characteristic() == 0
    assert cx.is_closed


@settings(max_examples=40, deadline=None)
@given(st.permutations(range(18)), st.lists(st.permutations(range(3)), min_size=18, max_size=18))
def test_ids_do_not_depend_on_input_order(order, rotations):
    tops = torus_tops(3)
    base = build_complex(tops)
    shuffled = [tuple(tops[i][r] for r in rot) for i, rot in zip(order, rotations)]
    assert build_complex(shuffled).roots == base.roots
