"""scikit-learn style front end to the solver.

    >>> from pxlaplace import PxLaplaceSolver, builtin_example
    >>> est = PxLaplaceSolver(max_iterations=200).fit(builtin_example(3), nx=16, ny=16)
    >>> est.predict([[0.0, 0.0]]).shape
    (1,)

``fit`` solves the boundary value problem; ``predict`` evaluates the
piecewise linear solution at arbitrary points of the domain.
"""

import numpy as np
from matplotlib.tri import LinearTriInterpolator, Triangulation
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .dc_solver import SolverConfig, iterate
from .mesh import Mesh, element_geometry
from .norms import ErrorReport, barycenter_error, linf_error, lp_norm
from .problem import ProblemSpec


class PxLaplaceSolver(BaseEstimator):
    """Finite element solver for ``-div(|grad u|^(p(x)-2) grad u) = f``, ``u = g``
    on the boundary, by the decomposition-coordination iteration.

    Parameters mirror :class:`~pxlaplace.dc_solver.SolverConfig`.

    Attributes
    ----------
    mesh_ : Mesh
    geometry_ : ElementGeometry
    report_ : SolveReport
    u_ : ndarray of shape (n_vertices,)
        Nodal values of the computed solution.
    exponent_ : ndarray of shape (n_elements,)
    n_iter_ : int
    converged_ : bool
    """

    def __init__(
        self,
        epsilon=1e-8,
        max_iterations=5000,
        r=1.0,
        init_scale=1e-2,
        seed=0,
        linear_tol=1e-10,
        scalar_tol=1e-12,
        linear_backend="cg",
        scalar_method="bisection",
        verbose=False,
    ):
        self.epsilon = epsilon
        self.max_iterations = max_iterations
        self.r = r
        self.init_scale = init_scale
        self.seed = seed
        self.linear_tol = linear_tol
        self.scalar_tol = scalar_tol
        self.linear_backend = linear_backend
        self.scalar_method = scalar_method
        self.verbose = verbose

    def solver_config(self):
        return SolverConfig(**self.get_params())

    def fit(self, problem, mesh=None, nx=None, ny=None, callback=None):
        """Solve ``problem`` on ``mesh``, or on the mesh its domain describes
        (``nx``/``ny`` override the problem's resolution)."""
        if not isinstance(problem, ProblemSpec):
            raise TypeError(f"problem must be a ProblemSpec, got {type(problem).__name__}")
        if mesh is None:
            mesh = problem.build_mesh(nx, ny)
        elif not isinstance(mesh, Mesh):
            raise TypeError(f"mesh must be a Mesh, got {type(mesh).__name__}")
        cfg = self.solver_config()
        geom = element_geometry(mesh)
        report = iterate(mesh, geom, problem, cfg, callback=callback)

        self.problem_ = problem
        self.mesh_ = mesh
        self.geometry_ = geom
        self.report_ = report
        self.u_ = report.u
        self.exponent_ = report.exponent
        self.n_iter_ = report.iterations
        self.converged_ = report.converged
        self._interp = None
        return self

    def predict(self, X):
        """Values of the P1 solution at the points ``X`` of shape (n, 2).

        Raises ``ValueError`` for points outside the mesh.
        """
        check_is_fitted(self, "u_")
        X = check_array(X, dtype=float, ensure_min_samples=1)
        if X.shape[1] != 2:
            raise ValueError(f"X must have 2 columns (x, y), got {X.shape[1]}")
        if self._interp is None:
            xy = self.mesh_.vertex_coordinates
            tri = Triangulation(xy[:, 0], xy[:, 1], self.mesh_.elem_vertices)
            self._interp = LinearTriInterpolator(tri, self.u_)
        out = self._interp(X[:, 0], X[:, 1])
        if np.ma.is_masked(out):
            k = int(np.flatnonzero(np.ma.getmaskarray(out))[0])
            raise ValueError(f"point {k} ({X[k, 0]!r}, {X[k, 1]!r}) lies outside the mesh")
        return np.asarray(out, dtype=float)

    def error_report(self, exact=None):
        """Max nodal error and Luxemburg-norm error against ``exact`` (defaults
        to the problem's exact solution)."""
        check_is_fitted(self, "u_")
        exact = exact if exact is not None else self.problem_.exact_expr
        if exact is None:
            raise ValueError("no exact solution available for this problem")
        e = barycenter_error(self.u_, exact, self.mesh_, self.geometry_)
        return ErrorReport(
            linf=linf_error(self.u_, exact, self.mesh_),
            lp=lp_norm(e, self.exponent_, self.geometry_),
        )
