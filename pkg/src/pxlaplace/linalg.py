"""Repeated SPD solves against one fixed sparse matrix."""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ConfigurationError, NumericalError

DEFAULT_TOL = 1e-10
BACKENDS = ("cg", "direct")


@dataclass(frozen=True, eq=False)
class SolveHandle:
    """Prepared state for one matrix: the inverse diagonal for Jacobi-PCG,
    or a sparse LU factorisation for the direct backend. Read-only, so
    concurrent solves are safe."""

    matrix: sp.csr_matrix
    backend: str
    inv_diag: np.ndarray | None = None
    factor: object = None
    max_iterations: int = 0

    @property
    def n(self):
        return self.matrix.shape[0]

    def solve(self, b, tol=DEFAULT_TOL, x0=None):
        return solve(self, b, tol, x0)


def prepare(A, backend="cg", max_iterations=None):
    """Prepare ``A`` (symmetric positive definite) for repeated solves."""
    if backend not in BACKENDS:
        raise ConfigurationError(f"unknown linear backend {backend!r}; choose from {BACKENDS}")
    A = sp.csr_matrix(A, dtype=float)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"matrix must be square, got {A.shape}")
    n = A.shape[0]
    diag = A.diagonal()
    if np.any(~(diag > 0)):
        k = int(np.flatnonzero(~(diag > 0))[0])
        raise NumericalError(f"matrix is not SPD: diagonal entry {k} is {diag[k]!r}")
    cap = 10 * n if max_iterations is None else int(max_iterations)

    if backend == "cg":
        inv = 1.0 / diag
        inv.setflags(write=False)
        return SolveHandle(A, "cg", inv_diag=inv, max_iterations=cap)

    # no pivoting: for an SPD matrix the LU pivots are the LDL^T pivots,
    # so a non-positive one proves the matrix is not SPD
    lu = spla.splu(
        A.tocsc(),
        permc_spec="MMD_AT_PLUS_A",
        diag_pivot_thresh=0.0,
        options={"SymmetricMode": True},
    )
    pivots = lu.U.diagonal()
    if np.any(~(pivots > 0)):
        raise NumericalError("matrix is not SPD: non-positive pivot in the factorisation")
    return SolveHandle(A, "direct", factor=lu, max_iterations=cap)


def solve(handle, b, tol=DEFAULT_TOL, x0=None):
    """Solve ``A u = b``.

    The CG backend returns ``u`` with ``||A u - b|| <= tol ||b||``; ``x0`` is
    an optional starting guess. A zero right-hand side returns zeros.
    """
    if not tol > 0:
        raise ConfigurationError(f"tol must be positive, got {tol!r}")
    b = np.asarray(b, dtype=float)
    if b.shape != (handle.n,):
        raise ValueError(f"right-hand side must have shape ({handle.n},), got {b.shape}")
    if not np.all(np.isfinite(b)):
        raise NumericalError("right-hand side has non-finite entries")
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros(handle.n)
    if handle.backend == "direct":
        return handle.factor.solve(b)
    return _pcg(handle.matrix, handle.inv_diag, b, bnorm, tol, x0, handle.max_iterations)


def _pcg(A, inv_diag, b, bnorm, tol, x0, maxiter):
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=float)
    target = tol * bnorm
    used = 0
    while True:
        # restart from the true residual until it (not just the recursive
        # one) meets the target
        r = b - A @ x
        rnorm = np.linalg.norm(r)
        if rnorm <= target:
            return x
        if used >= maxiter:
            raise NumericalError(
                f"CG did not reach relative residual {tol:g} in {maxiter} iterations "
                f"(achieved {rnorm / bnorm:.3e})",
                residual=rnorm / bnorm,
            )
        z = inv_diag * r
        d = z.copy()
        rz = r @ z
        while used < maxiter:
            used += 1
            Ad = A @ d
            curv = d @ Ad
            if not curv > 0:
                raise NumericalError(
                    "matrix is not SPD: CG encountered non-positive curvature", residual=rnorm / bnorm
                )
            alpha = rz / curv
            x += alpha * d
            r -= alpha * Ad
            rnorm = np.linalg.norm(r)
            if rnorm <= target:
                break
            z = inv_diag * r
            rz_new = r @ z
            d *= rz_new / rz
            d += z
            rz = rz_new
