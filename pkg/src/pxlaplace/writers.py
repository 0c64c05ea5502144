"""Solution output for external plotting: CSV and legacy ASCII VTK."""

from pathlib import Path

import numpy as np

VTK_TRIANGLE = 5


def _check(mesh, u):
    u = np.asarray(u, dtype=float)
    if u.shape != (mesh.n_vertices,):
        raise ValueError(f"u must have one value per vertex ({mesh.n_vertices}), got shape {u.shape}")
    return u


def write_csv(mesh, u, path):
    """``x,y,u`` rows in vertex order, 17 significant digits (exact round trip)."""
    u = _check(mesh, u)
    lines = ["x,y,u"]
    for (x, y), v in zip(mesh.vertex_coordinates.tolist(), u.tolist()):
        lines.append(f"{x:.17g},{y:.17g},{v:.17g}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_csv(path):
    """Inverse of :func:`write_csv`; returns ``(xy, u)``."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2, encoding="utf-8")
    return data[:, :2], data[:, 2]


def write_vtk(mesh, u, path, title="p(x)-Laplacian solution"):
    u = _check(mesh, u)
    n, nt = mesh.n_vertices, mesh.n_elements
    out = [
        "# vtk DataFile Version 3.0",
        title.replace("\n", " ")[:255],
        "ASCII",
        "DATASET UNSTRUCTURED_GRID",
        f"POINTS {n} double",
    ]
    out += [f"{x:.17g} {y:.17g} 0" for x, y in mesh.vertex_coordinates.tolist()]
    out.append(f"CELLS {nt} {4 * nt}")
    out += [f"3 {i} {j} {k}" for i, j, k in mesh.elem_vertices.tolist()]
    out.append(f"CELL_TYPES {nt}")
    out += [str(VTK_TRIANGLE)] * nt
    out += [f"POINT_DATA {n}", "SCALARS u double 1", "LOOKUP_TABLE default"]
    out += [f"{v:.17g}" for v in u.tolist()]
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")
