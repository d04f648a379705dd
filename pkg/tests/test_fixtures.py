from pathlib import Path

import numpy as np
import pytest

from dualtri.cli import main
from dualtri.errors import UnknownFixture
from dualtri.fixtures import FIXTURES, generate_fixture
from dualtri.geometry import compute_geometry, total_volume_check
from dualtri.laplace import assemble_laplacian, check_semidefiniteness
from dualtri.metric import as_weighted
from dualtri.regularity import is_edge_positive

GOLDEN = Path(__file__).parent / "golden"

MESHES = {
    "tetrahedron_boundary": ["tetrahedron_boundary"],
    "thin_hinge": ["thin_hinge"],
    "square_hinge": ["square_hinge"],
    "paper_torus": ["paper_torus"],
    "flat_torus_grid": ["flat_torus_grid", "-p", "k=3"],
    "icosahedron_boundary": ["icosahedron_boundary"],
    "random_surface": ["random_surface", "-p", "v=10", "-p", "weight_spread=0.3", "--seed", "7"],
    "sphere_packing_s3": ["sphere_packing_s3", "--seed", "1"],
}


def _run(argv, capsys):
    assert main(argv) == 0
    return capsys.readouterr().out


@pytest.mark.parametrize("name", sorted(MESHES))
def test_golden_meshes(name, capsys):
    first = _run(["gen"] + MESHES[name], capsys)
    second = _run(["gen"] + MESHES[name], capsys)
    assert first == second
    assert first == (GOLDEN / (name + ".mesh")).read_text()


@pytest.mark.parametrize("suffix, argv", [("dual", ["dualize"]), ("matrix", ["laplace", "assemble"])])
def test_golden_reports(suffix, argv, capsys):
    mesh = str(GOLDEN / "tetrahedron_boundary.mesh")
    first = _run(argv + [mesh], capsys)
    assert first == _run(argv + [mesh], capsys)
    assert first == (GOLDEN / ("tetrahedron_boundary." + suffix)).read_text()


def test_unknown_fixture():
    with pytest.raises(UnknownFixture):
        generate_fixture("moebius")


def test_all_fixtures_are_known():
    assert set(MESHES) == set(FIXTURES)


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_fixtures_satisfy_volume_identity(name):
    geo = compute_geometry(generate_fixture(name).metric)
    rep = total_volume_check(geo)
    assert rep.passed
    assert rep.closed == (name not in ("thin_hinge", "square_hinge"))


@pytest.mark.parametrize("name", ["flat_torus_grid", "tetrahedron_boundary", "icosahedron_boundary", "random_surface"])
def test_simply_connected_or_weighted_fixtures_convert(name):
    w = as_weighted(generate_fixture(name).metric)
    assert np.all(np.isfinite(w.weights))


def test_random_surface_is_edge_positive_and_reproducible():
    a = generate_fixture("random_surface", {"v": 30, "weight_spread": 0.5}, seed=3)
    b = generate_fixture("random_surface", {"v": 30, "weight_spread": 0.5}, seed=3)
    assert a.text() == b.text()
    assert a.complex.num_vertices == 30 and a.complex.euler_characteristic() == 2
    from dualtri.metric import as_duality

    assert is_edge_positive(as_duality(a.metric))[0]


def test_sphere_packing_is_a_three_sphere():
    doc = generate_fixture("sphere_packing_s3", seed=5)
    assert doc.complex.n == 3 and doc.complex.euler_characteristic() == 0
    rep = check_semidefiniteness(assemble_laplacian(compute_geometry(doc.metric)), "sphere_packing")
    assert rep.hypothesis_holds and rep.passed
