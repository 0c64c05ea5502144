"""Triangular meshes and per-element P1 geometry."""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError, MeshError


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Mesh:
    """A conforming triangulation.

    Attributes
    ----------
    vertex_coordinates : (N_n, 2) float array
    elem_vertices : (N_t, 3) int array, counterclockwise
    dirichlet_nodes : (N_d,) int array of boundary vertex indices, sorted
    """

    vertex_coordinates: np.ndarray
    elem_vertices: np.ndarray
    dirichlet_nodes: np.ndarray

    def __post_init__(self):
        xy = _frozen(self.vertex_coordinates, float)
        tri = _frozen(self.elem_vertices, np.int64)
        bnd = _frozen(np.sort(np.asarray(self.dirichlet_nodes, dtype=np.int64).ravel()), np.int64)
        if xy.ndim != 2 or xy.shape[1] != 2:
            raise MeshError(f"vertex_coordinates must be N_n x 2, got shape {xy.shape}")
        if tri.ndim != 2 or tri.shape[1] != 3:
            raise MeshError(f"elem_vertices must be N_t x 3, got shape {tri.shape}")
        if not np.all(np.isfinite(xy)):
            raise MeshError("vertex coordinates must be finite")
        n = len(xy)
        if tri.size and (tri.min() < 0 or tri.max() >= n):
            bad = int(np.flatnonzero(((tri < 0) | (tri >= n)).any(axis=1))[0])
            raise MeshError(f"triangle {bad} references a vertex outside [0, {n})", element=bad)
        if bnd.size and (bnd[0] < 0 or bnd[-1] >= n):
            raise MeshError(f"dirichlet node index outside [0, {n})")
        if np.any(np.diff(bnd) == 0):
            raise MeshError("dirichlet_nodes contains duplicates")
        object.__setattr__(self, "vertex_coordinates", xy)
        object.__setattr__(self, "elem_vertices", tri)
        object.__setattr__(self, "dirichlet_nodes", bnd)

    @property
    def n_vertices(self):
        return len(self.vertex_coordinates)

    @property
    def n_elements(self):
        return len(self.elem_vertices)

    @property
    def interior_nodes(self):
        mask = np.ones(self.n_vertices, dtype=bool)
        mask[self.dirichlet_nodes] = False
        return np.flatnonzero(mask)


@dataclass(frozen=True, eq=False)
class ElementGeometry:
    """Constant-per-element quantities used by P1 assembly.

    ``basis_gradients[t, i]`` is the gradient of the hat function of local
    vertex ``i`` on triangle ``t``. ``grad_x``/``grad_y`` are the sparse
    N_t x N_n operators mapping nodal values to the elementwise gradient.
    """

    area: np.ndarray
    basis_gradients: np.ndarray
    barycenter: np.ndarray
    grad_x: sp.csr_matrix
    grad_y: sp.csr_matrix

    @property
    def domain_area(self):
        return float(self.area.sum())


def generate_structured(xmin, xmax, ymin, ymax, nx, ny):
    """Regular grid of ``nx`` x ``ny`` cells, each split along its
    bottom-left to top-right diagonal.

    Vertices are numbered row by row with x varying fastest.
    """
    for name, v in (("nx", nx), ("ny", ny)):
        if isinstance(v, bool) or int(v) != v or v < 1:
            raise ConfigurationError(f"{name} must be a positive integer, got {v!r}")
    nx, ny = int(nx), int(ny)
    bounds = np.array([xmin, xmax, ymin, ymax], dtype=float)
    if not np.all(np.isfinite(bounds)):
        raise ConfigurationError("domain bounds must be finite")
    if not (xmax > xmin and ymax > ymin):
        raise ConfigurationError(
            f"empty domain: need xmax > xmin and ymax > ymin, got {xmin}, {xmax}, {ymin}, {ymax}"
        )

    xs = np.linspace(xmin, xmax, nx + 1)
    ys = np.linspace(ymin, ymax, ny + 1)
    gx, gy = np.meshgrid(xs, ys)
    coords = np.column_stack([gx.ravel(), gy.ravel()])

    j, i = np.meshgrid(np.arange(ny), np.arange(nx), indexing="ij")
    bl = (j * (nx + 1) + i).ravel()
    br = bl + 1
    tl = bl + nx + 1
    tr = tl + 1
    tris = np.empty((2 * nx * ny, 3), dtype=np.int64)
    tris[0::2] = np.column_stack([bl, br, tr])
    tris[1::2] = np.column_stack([bl, tr, tl])

    col, row = np.meshgrid(np.arange(nx + 1), np.arange(ny + 1))
    perimeter = (col == 0) | (col == nx) | (row == 0) | (row == ny)
    return Mesh(coords, tris, np.flatnonzero(perimeter.ravel()))


def boundary_nodes(elem_vertices):
    """Vertices on edges that belong to exactly one triangle."""
    tri = np.asarray(elem_vertices)
    edges = np.sort(np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]]), axis=1)
    uniq, counts = np.unique(edges, axis=0, return_counts=True)
    if np.any(counts > 2):
        raise MeshError("non-conforming mesh: an edge is shared by more than two triangles")
    return np.unique(uniq[counts == 1])


def element_geometry(mesh):
    tri = mesh.elem_vertices
    pts = mesh.vertex_coordinates[tri]  # (N_t, 3, 2)
    e1 = pts[:, 1] - pts[:, 0]
    e2 = pts[:, 2] - pts[:, 0]
    det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    bad = np.flatnonzero(~(det > 0))
    if bad.size:
        t = int(bad[0])
        kind = "degenerate (zero-area)" if det[t] == 0 else "clockwise or invalid"
        raise MeshError(f"triangle {t} is {kind}: signed doubled area {det[t]!r}", element=t)

    grads = np.empty((len(tri), 3, 2))
    # gradient of the hat function at vertex i is the inward normal of the
    # opposite edge divided by twice the area
    grads[:, 1, 0] = e2[:, 1] / det
    grads[:, 1, 1] = -e2[:, 0] / det
    grads[:, 2, 0] = -e1[:, 1] / det
    grads[:, 2, 1] = e1[:, 0] / det
    grads[:, 0] = -grads[:, 1] - grads[:, 2]

    rows = np.repeat(np.arange(len(tri)), 3)
    shape = (len(tri), mesh.n_vertices)
    gx = sp.csr_matrix((grads[:, :, 0].ravel(), (rows, tri.ravel())), shape=shape)
    gy = sp.csr_matrix((grads[:, :, 1].ravel(), (rows, tri.ravel())), shape=shape)

    return ElementGeometry(
        area=_frozen(det / 2.0, float),
        basis_gradients=_frozen(grads, float),
        barycenter=_frozen(pts.mean(axis=1), float),
        grad_x=gx,
        grad_y=gy,
    )


def read_mesh(path):
    """Read the plain-text mesh format: ``nv nt nd`` header, then vertex,
    triangle and boundary-node lines (0-based indices)."""
    try:
        tokens = Path(path).read_text(encoding="utf-8").split()
    except UnicodeDecodeError as exc:
        raise MeshError(f"{path}: not valid UTF-8") from exc
    try:
        nv, nt, nd = (int(t) for t in tokens[:3])
    except ValueError as exc:
        raise MeshError(f"{path}: malformed header") from exc
    if min(nv, nt, nd) < 0:
        raise MeshError(f"{path}: negative counts in header")
    expected = 3 + 2 * nv + 3 * nt + nd
    if len(tokens) != expected:
        raise MeshError(f"{path}: expected {expected} tokens, found {len(tokens)}")
    body = tokens[3:]
    try:
        xy = np.array(body[: 2 * nv], dtype=float).reshape(nv, 2)
        tri = np.array(body[2 * nv : 2 * nv + 3 * nt], dtype=np.int64).reshape(nt, 3)
        bnd = np.array(body[2 * nv + 3 * nt :], dtype=np.int64)
    except ValueError as exc:
        raise MeshError(f"{path}: {exc}") from exc
    return Mesh(xy, tri, bnd)


def write_mesh(mesh, path):
    lines = [f"{mesh.n_vertices} {mesh.n_elements} {len(mesh.dirichlet_nodes)}"]
    lines += [f"{x!r} {y!r}" for x, y in mesh.vertex_coordinates.tolist()]
    lines += [f"{i} {j} {k}" for i, j, k in mesh.elem_vertices.tolist()]
    lines += [str(d) for d in mesh.dirichlet_nodes.tolist()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
