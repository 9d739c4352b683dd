import io

import numpy as np
import pytest
from hypothesis import given, strategies as st

from helmacms.mesh import (DIRICHLET, GeometrySpec, MeshError, TriMesh, coarse_mesh, extract_skeleton,
                           generate, mesh_size, read_mesh, refine_uniform, subdomains_connected, write_mesh)


@pytest.mark.parametrize("refinements", [0, 1, 2])
def test_disc_skeleton_counts(refinements):
    mesh, sk = generate(GeometrySpec.unit_disc_8(), refinements)
    assert mesh.n_subdomains == 8
    assert (sk.n_edges, sk.n_vertices) == (12, 5)


@pytest.mark.parametrize("refinements", [0, 1])
def test_crystal_grid_skeleton_counts(refinements):
    mesh, sk = generate(GeometrySpec.unit_square_grid(9, 1), refinements)
    assert mesh.n_subdomains == 81
    assert (sk.n_edges, sk.n_vertices) == (180, 100)


def test_square_3x3_interior_interfaces():
    # hand count: 12 interior edges and 4 interior crossings, plus the Robin boundary pieces
    mesh, sk = generate(GeometrySpec.unit_square_grid(3, 2), 0)
    interior_edges = [e for e in sk.edges if not e.on_boundary]
    assert len(interior_edges) == 12
    inner_vertices = [v for v in sk.vertices if np.all(np.abs(mesh.vertices[v.node] - 0.5) < 0.5 - 1e-9)]
    assert len(inner_vertices) == 4
    assert (sk.n_edges, sk.n_vertices) == (24, 16)


def test_single_square_skeleton_is_its_boundary():
    mesh, sk = generate(GeometrySpec.unit_square_grid(1, 4), 0)
    assert (sk.n_edges, sk.n_vertices) == (4, 4)
    assert all(e.on_boundary for e in sk.edges)


def test_all_dirichlet_square_has_empty_skeleton():
    geo = GeometrySpec.unit_square_grid(1, 4, dirichlet=lambda m: np.ones(len(m), dtype=bool))
    mesh, sk = generate(geo, 0)
    assert (sk.n_edges, sk.n_vertices) == (0, 0)
    assert np.all(mesh.boundary_markers == DIRICHLET)


def test_refinement_quadruples_triangles_and_keeps_circle():
    geo = GeometrySpec.unit_disc_8()
    m0 = coarse_mesh(geo)
    m1 = refine_uniform(m0, geo)
    assert m1.n_triangles == 4 * m0.n_triangles
    r = np.linalg.norm(m1.vertices[m1.boundary_vertices()], axis=1)
    assert np.max(np.abs(r - 1)) < 1e-12


def test_mesh_size_two_refinements_ratio():
    geo = GeometrySpec.unit_disc_8()
    hs = [mesh_size(generate(geo, r)[0]) for r in range(4)]
    assert all(b < a for a, b in zip(hs, hs[1:]))
    assert 0.45 <= hs[2] / hs[1] <= 0.55
    assert hs[0] == pytest.approx(0.459115, abs=1e-6)


def test_mesh_size_single_triangle():
    tri = TriMesh(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]), np.array([[0, 1, 2]]), np.array([1]),
                  np.array([[0, 1], [1, 2], [2, 0]]), np.array(["R", "R", "R"]))
    assert mesh_size(tri) == pytest.approx(np.sqrt(2))


def test_straight_refinement_halves_h():
    geo = GeometrySpec.unit_square_grid(2, 2)
    m0 = coarse_mesh(geo)
    assert mesh_size(refine_uniform(m0, geo)) == pytest.approx(mesh_size(m0) / 2)


@pytest.mark.parametrize("geo", [GeometrySpec.unit_disc_8(), GeometrySpec.unit_square_grid(3, 2)])
def test_mesh_invariants(geo):
    mesh, sk = generate(geo, 1)
    areas = mesh.areas()
    assert areas.min() > 0
    per = sum(areas[mesh.subdomain == j].sum() for j in mesh.subdomain_ids)
    assert per == pytest.approx(areas.sum(), rel=1e-12)
    assert subdomains_connected(mesh)
    # interior chain nodes touch exactly the listed subdomains
    for e in sk.edges:
        for p in e.interior_nodes:
            touching = set(mesh.subdomain[np.any(mesh.triangles == p, axis=1)].tolist())
            assert touching == set(e.subdomains)
    # every skeleton node is on exactly one edge or is a vertex
    interior = np.concatenate([e.interior_nodes for e in sk.edges])
    assert len(interior) == len(np.unique(interior))
    assert not set(interior.tolist()) & {v.node for v in sk.vertices}
    for v in sk.vertices:
        assert len(v.adjacent_edges) >= 2


def test_disc_area_converges():
    geo = GeometrySpec.unit_disc_8()
    a = [generate(geo, r)[0].areas().sum() for r in range(3)]
    assert abs(a[2] - np.pi) < abs(a[1] - np.pi) < abs(a[0] - np.pi)


def test_non_manifold_interface_rejected():
    v = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 1.0], [0.5, -1.0], [0.5, 0.5]])
    t = np.array([[0, 1, 2], [1, 0, 3], [0, 1, 4]])
    be = np.array([[1, 2], [2, 0], [0, 3], [3, 1]])
    mesh = TriMesh(v, t, np.array([1, 2, 3]), be, np.array(["R"] * 4))
    with pytest.raises(MeshError):
        extract_skeleton(mesh)


def test_unsupported_geometry():
    with pytest.raises(MeshError):
        generate(GeometrySpec("hexagon"), 0)


def test_text_format_round_trip():
    mesh, _ = generate(GeometrySpec.unit_disc_8(), 1)
    values = np.exp(1j * mesh.vertices[:, 0])
    buf = io.StringIO()
    write_mesh(mesh, buf, values)
    text = buf.getvalue()
    assert text.startswith("acmsmesh 1\nvertices ")
    back, vals = read_mesh(io.StringIO(text))
    assert np.array_equal(back.vertices, mesh.vertices)
    assert np.array_equal(back.triangles, mesh.triangles)
    assert np.array_equal(back.boundary_markers, mesh.boundary_markers)
    assert np.array_equal(vals, values)
    assert back.fingerprint() == mesh.fingerprint()


@given(st.integers(min_value=1, max_value=4), st.integers(min_value=1, max_value=3))
def test_square_grid_counts_property(n, res):
    # n x n cells: 2n(n+1) grid segments, (n+1)^2 grid points
    mesh, sk = generate(GeometrySpec.unit_square_grid(n, res), 0)
    assert sk.n_edges == 2 * n * (n + 1)
    assert sk.n_vertices == (n + 1) ** 2
    assert mesh.n_triangles == 2 * (n * res) ** 2
