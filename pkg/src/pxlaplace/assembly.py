"""P1 assembly: stiffness matrix, load vector, divergence term, Dirichlet elimination."""

import numpy as np
import scipy.sparse as sp

from .errors import EvaluationError


def assemble_stiffness(mesh, geom):
    """A[i, j] = sum over triangles of |T| grad(phi_i) . grad(phi_j).

    Exact, since the integrand is constant on each triangle. Returned in
    canonical CSR form (sorted indices, no duplicates).
    """
    g = geom.basis_gradients
    local = np.einsum("tid,tjd->tij", g, g) * geom.area[:, None, None]
    tri = mesh.elem_vertices
    rows = np.repeat(tri, 3, axis=1).ravel()
    cols = np.tile(tri, (1, 3)).ravel()
    n = mesh.n_vertices
    A = sp.csr_matrix((local.ravel(), (rows, cols)), shape=(n, n))
    A.sum_duplicates()
    A.sort_indices()
    return A


def assemble_load(mesh, geom, f_expr):
    """F[k] ~ integral of f * phi_k with the one-point barycenter rule."""
    bc = geom.barycenter
    fvals = np.broadcast_to(f_expr(bc[:, 0], bc[:, 1]), (mesh.n_elements,))
    contrib = np.repeat(geom.area * fvals / 3.0, 3)
    return np.bincount(mesh.elem_vertices.ravel(), weights=contrib, minlength=mesh.n_vertices)


def assemble_divergence(mesh, geom, w):
    """G[k] = sum over triangles of |T| w_T . grad(phi_k), for an elementwise
    constant vector field ``w`` of shape (N_t, 2).

    Note the sign: this is the weak form of ``-div w``, i.e. for ``w = grad v``
    it reproduces ``A @ v``.
    """
    w = np.asarray(w, dtype=float)
    if w.shape != (mesh.n_elements, 2):
        raise ValueError(f"w must have shape ({mesh.n_elements}, 2), got {w.shape}")
    return geom.grad_x.T @ (geom.area * w[:, 0]) + geom.grad_y.T @ (geom.area * w[:, 1])


def eliminate_dirichlet(A, nodes, values):
    """Symmetric elimination of prescribed nodal values.

    Returns ``(A_elim, lift)``. ``A_elim`` has the rows and columns of
    ``nodes`` zeroed with a unit diagonal. ``lift`` holds ``-A[:, nodes] @ values``
    on free nodes and ``values`` on ``nodes``; combine it with any load
    vector through :func:`apply_lift`.
    """
    A = sp.csr_matrix(A)
    n = A.shape[0]
    nodes = np.asarray(nodes, dtype=np.int64)
    values = np.asarray(values, dtype=float)
    fixed = np.zeros(n, dtype=bool)
    fixed[nodes] = True

    lift = -(A[:, nodes] @ values)
    lift[nodes] = values

    keep = sp.diags((~fixed).astype(float))
    A_elim = (keep @ A @ keep + sp.diags(fixed.astype(float))).tocsr()
    A_elim.eliminate_zeros()
    A_elim.sum_duplicates()
    A_elim.sort_indices()
    return A_elim, lift


def apply_lift(b, nodes, lift):
    out = np.asarray(b, dtype=float) + lift
    out[nodes] = lift[nodes]
    return out


def impose_dirichlet(A, b, mesh, g_expr):
    """Impose u = g on ``mesh.dirichlet_nodes``; returns ``(A_elim, b_elim)``."""
    nodes = mesh.dirichlet_nodes
    xy = mesh.vertex_coordinates[nodes]
    try:
        g = np.broadcast_to(g_expr(xy[:, 0], xy[:, 1]), (len(nodes),))
    except EvaluationError as exc:
        raise EvaluationError(f"boundary data: {exc}") from exc
    A_elim, lift = eliminate_dirichlet(A, nodes, g)
    return A_elim, apply_lift(b, nodes, lift)
