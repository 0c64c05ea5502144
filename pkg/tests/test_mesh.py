import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pxlaplace.errors import ConfigurationError, MeshError
from pxlaplace.mesh import Mesh, boundary_nodes, element_geometry, generate_structured, read_mesh, write_mesh


@pytest.mark.parametrize(
    "nx, ny, nv, nt, nd",
    [(1, 1, 4, 2, 4), (2, 2, 9, 8, 8), (100, 100, 10201, 20000, 400), (3, 1, 8, 6, 8)],
)
def test_structured_counts(nx, ny, nv, nt, nd):
    mesh = generate_structured(0, 1, 0, 1, nx, ny)
    assert mesh.n_vertices == nv
    assert mesh.n_elements == nt
    assert len(mesh.dirichlet_nodes) == nd


def test_row_major_numbering():
    mesh = generate_structured(0, 2, 0, 1, 2, 1)
    np.testing.assert_array_equal(
        mesh.vertex_coordinates, [[0, 0], [1, 0], [2, 0], [0, 1], [1, 1], [2, 1]]
    )


@pytest.mark.parametrize("bad", [(1, 0, 0, 1, 2, 2), (0, 1, 1, 1, 2, 2), (0, 1, 0, 1, 0, 2), (0, 1, 0, 1, 2, -1), (0, 1, 0, 1, 1.5, 1)])
def test_structured_rejects_bad_input(bad):
    with pytest.raises(ConfigurationError):
        generate_structured(*bad)


def test_structured_boundary_is_perimeter():
    mesh = generate_structured(-2, 2, -1, 1, 8, 4)
    np.testing.assert_array_equal(mesh.dirichlet_nodes, boundary_nodes(mesh.elem_vertices))
    xy = mesh.vertex_coordinates[mesh.dirichlet_nodes]
    on_edge = np.isclose(np.abs(xy[:, 0]), 2) | np.isclose(np.abs(xy[:, 1]), 1)
    assert on_edge.all()


def test_unit_triangle_geometry(unit_triangle):
    g = element_geometry(unit_triangle)
    assert g.area[0] == 0.5
    np.testing.assert_array_equal(g.basis_gradients[0], [[-1, -1], [1, 0], [0, 1]])
    np.testing.assert_allclose(g.barycenter[0], [1 / 3, 1 / 3])


def test_scaling_by_two(unit_triangle):
    big = Mesh(2 * unit_triangle.vertex_coordinates, unit_triangle.elem_vertices, [0, 1, 2])
    g1, g2 = element_geometry(unit_triangle), element_geometry(big)
    assert g2.area[0] == pytest.approx(4 * g1.area[0])
    np.testing.assert_allclose(g2.basis_gradients, g1.basis_gradients / 2)


def test_partition_of_unity_and_nodal_delta(skewed):
    mesh, g = skewed
    np.testing.assert_allclose(g.basis_gradients.sum(axis=1), 0, atol=1e-12)
    # phi_i(x) = 1/3 + grad(phi_i) . (x - barycenter) must be delta_ij at the vertices
    pts = mesh.vertex_coordinates[mesh.elem_vertices]
    phi = 1 / 3 + np.einsum("tid,tjd->tji", g.basis_gradients, pts - g.barycenter[:, None, :])
    np.testing.assert_allclose(phi, np.broadcast_to(np.eye(3), phi.shape), atol=1e-12)


def test_areas_sum_to_domain_area():
    mesh = generate_structured(-2, 2, -1, 1, 37, 23)
    assert element_geometry(mesh).area.sum() == pytest.approx(8.0, rel=1e-12)


def test_interior_vertices_have_six_triangles():
    mesh = generate_structured(0, 1, 0, 1, 6, 5)
    counts = np.bincount(mesh.elem_vertices.ravel(), minlength=mesh.n_vertices)
    assert (counts[mesh.interior_nodes] == 6).all()


def test_triangles_counterclockwise():
    mesh = generate_structured(0, 3, 0, 1, 9, 4)
    assert (element_geometry(mesh).area > 0).all()


@settings(max_examples=50, deadline=None)
@given(
    a=st.floats(-10, 10),
    b=st.floats(-10, 10),
    c=st.floats(-10, 10),
    nx=st.integers(1, 6),
    ny=st.integers(1, 6),
)
def test_affine_gradient_exact(a, b, c, nx, ny):
    mesh = generate_structured(-1, 0.5, 0.25, 2, nx, ny)
    g = element_geometry(mesh)
    v = a * mesh.vertex_coordinates[:, 0] + b * mesh.vertex_coordinates[:, 1] + c
    grad = np.einsum("ti,tid->td", v[mesh.elem_vertices], g.basis_gradients)
    np.testing.assert_allclose(grad, np.broadcast_to([a, b], grad.shape), atol=1e-12 * (1 + abs(c)) * 10)
    np.testing.assert_allclose(g.grad_x @ v, a, atol=1e-11 * (1 + abs(c)))


def test_degenerate_triangle_named():
    mesh = Mesh([[0, 0], [1, 0], [2, 0], [0, 1]], [[0, 1, 3], [0, 1, 2]], [0, 1, 2, 3])
    with pytest.raises(MeshError, match="triangle 1") as info:
        element_geometry(mesh)
    assert info.value.element == 1


def test_clockwise_triangle_rejected():
    mesh = Mesh([[0, 0], [1, 0], [0, 1]], [[0, 2, 1]], [0, 1, 2])
    with pytest.raises(MeshError, match="triangle 0"):
        element_geometry(mesh)


def test_index_out_of_range():
    with pytest.raises(MeshError, match="outside"):
        Mesh([[0, 0], [1, 0], [0, 1]], [[0, 1, 3]], [0])


def test_duplicate_dirichlet_nodes():
    with pytest.raises(MeshError, match="duplicates"):
        Mesh([[0, 0], [1, 0], [0, 1]], [[0, 1, 2]], [0, 0])


def test_mesh_is_immutable(unit_triangle):
    with pytest.raises(ValueError):
        unit_triangle.vertex_coordinates[0, 0] = 5.0


def test_mesh_file_round_trip(tmp_path):
    mesh = generate_structured(-0.3, 1.7, 0.1, 0.9, 5, 3)
    path = tmp_path / "m.txt"
    write_mesh(mesh, path)
    header = path.read_text(encoding="utf-8").splitlines()[0]
    assert header == f"{mesh.n_vertices} {mesh.n_elements} {len(mesh.dirichlet_nodes)}"
    back = read_mesh(path)
    np.testing.assert_array_equal(back.vertex_coordinates, mesh.vertex_coordinates)
    np.testing.assert_array_equal(back.elem_vertices, mesh.elem_vertices)
    np.testing.assert_array_equal(back.dirichlet_nodes, mesh.dirichlet_nodes)


def test_mesh_file_l_shape(tmp_path):
    # non-rectangular domain: L-shape made of three unit squares
    path = tmp_path / "l.txt"
    path.write_text(
        "8 6 8\n"
        "0 0\n1 0\n2 0\n0 1\n1 1\n2 1\n0 2\n1 2\n"
        "0 1 4\n0 4 3\n1 2 5\n1 5 4\n3 4 7\n3 7 6\n"
        "0\n1\n2\n3\n4\n5\n6\n7\n",
        encoding="utf-8",
    )
    mesh = read_mesh(path)
    assert element_geometry(mesh).domain_area == pytest.approx(3.0)


def test_mesh_file_token_count(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("3 1 3\n0 0\n1 0\n0 1\n0 1 2\n0\n1\n", encoding="utf-8")
    with pytest.raises(MeshError, match="expected 15 tokens"):
        read_mesh(path)
