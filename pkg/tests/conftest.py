import numpy as np
import pytest

from pxlaplace.mesh import Mesh, element_geometry, generate_structured


@pytest.fixture
def unit_triangle():
    return Mesh([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [[0, 1, 2]], [0, 1, 2])


@pytest.fixture
def square2():
    mesh = generate_structured(0, 1, 0, 1, 2, 2)
    return mesh, element_geometry(mesh)


@pytest.fixture
def skewed():
    """A structured mesh with jittered interior vertices, so nothing lines up."""
    base = generate_structured(-1, 2, 0, 1.5, 7, 5)
    rng = np.random.default_rng(42)
    xy = base.vertex_coordinates.copy()
    interior = base.interior_nodes
    xy[interior] += rng.uniform(-0.08, 0.08, (len(interior), 2))
    mesh = Mesh(xy, base.elem_vertices, base.dirichlet_nodes)
    return mesh, element_geometry(mesh)
