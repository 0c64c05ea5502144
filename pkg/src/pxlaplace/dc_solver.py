"""Decomposition-coordination (augmented Lagrangian) iteration.

Given the multiplier ``eta`` and the auxiliary gradient ``nu`` on each
triangle, one sweep does::

    r (grad u, grad v) = (f, v) - (eta - r nu, grad v)     for all v, u = g on the boundary
    nu  <- solution of |nu|^(p-2) nu + r nu = eta + r grad u
    eta <- eta + r (grad u - nu)

With ``r = 1`` this is the plain scheme; the stiffness matrix never changes,
so it is assembled, eliminated and prepared once.
"""

import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .assembly import apply_lift, assemble_divergence, assemble_load, assemble_stiffness, eliminate_dirichlet
from .errors import ConfigurationError, NumericalError
from .linalg import BACKENDS, prepare, solve
from .local_solver import METHODS, update_nu
from .norms import relative_error
from .problem import boundary_values, sample_exponent


@dataclass(frozen=True)
class SolverConfig:
    epsilon: float = 1e-8
    max_iterations: int = 5000
    r: float = 1.0
    init_scale: float = 1e-2
    seed: int = 0
    linear_tol: float = 1e-10
    scalar_tol: float = 1e-12
    linear_backend: str = "cg"
    scalar_method: str = "bisection"
    verbose: bool = False

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ConfigurationError(f"epsilon must be positive, got {self.epsilon!r}")
        if not self.r > 0:
            raise ConfigurationError(f"r must be positive, got {self.r!r}")
        if isinstance(self.max_iterations, bool) or int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise ConfigurationError(f"max_iterations must be an integer >= 1, got {self.max_iterations!r}")
        if not self.init_scale >= 0:
            raise ConfigurationError(f"init_scale must be nonnegative, got {self.init_scale!r}")
        if not (self.linear_tol > 0 and self.scalar_tol > 0):
            raise ConfigurationError("linear_tol and scalar_tol must be positive")
        if self.linear_backend not in BACKENDS:
            raise ConfigurationError(f"unknown linear backend {self.linear_backend!r}; choose from {BACKENDS}")
        if self.scalar_method not in METHODS:
            raise ConfigurationError(f"unknown scalar method {self.scalar_method!r}; choose from {METHODS}")


@dataclass
class SolveReport:
    u: np.ndarray
    iterations: int
    relative_errors: np.ndarray
    converged: bool
    wall_time: float
    final_nu: np.ndarray
    final_eta: np.ndarray
    exponent: np.ndarray = field(repr=False, default=None)
    setup_time: float = 0.0


def gradient(mesh, geom, u):
    """Elementwise constant gradient of the P1 function with nodal values ``u``."""
    u = np.asarray(u, dtype=float)
    return np.column_stack([geom.grad_x @ u, geom.grad_y @ u])


def iterate(mesh, geom, spec, cfg=None, eta0=None, nu0=None, callback=None):
    """Run the iteration until the relative change of ``u`` drops to
    ``cfg.epsilon`` or ``cfg.max_iterations`` sweeps have been made.

    ``eta0``/``nu0`` replace the seeded random start. ``callback``, if given,
    is called after every sweep with a dict holding ``iteration``, ``u``,
    ``gradu``, ``eta_old``, ``eta``, ``nu``, ``w``, ``exponent`` and ``relerr``.
    """
    cfg = cfg or SolverConfig()
    r = float(cfg.r)
    t_start = time.perf_counter()

    p = sample_exponent(spec, geom)
    F = assemble_load(mesh, geom, spec.f_expr)
    A = assemble_stiffness(mesh, geom)
    nodes = mesh.dirichlet_nodes
    A_elim, lift = eliminate_dirichlet(A, nodes, boundary_values(spec, mesh))
    handle = prepare(A_elim, backend=cfg.linear_backend)

    rng = np.random.default_rng(cfg.seed)
    shape = (mesh.n_elements, 2)
    eta = rng.uniform(-cfg.init_scale, cfg.init_scale, shape)
    nu = rng.uniform(-cfg.init_scale, cfg.init_scale, shape)
    if eta0 is not None:
        eta = np.array(eta0, dtype=float).reshape(shape)
    if nu0 is not None:
        nu = np.array(nu0, dtype=float).reshape(shape)

    setup_time = time.perf_counter() - t_start
    u_old = np.zeros(mesh.n_vertices)
    history = []
    converged = False
    for n in range(1, cfg.max_iterations + 1):
        rhs = (F - assemble_divergence(mesh, geom, eta - r * nu)) / r
        b = apply_lift(rhs, nodes, lift)
        try:
            u = solve(handle, b, cfg.linear_tol, x0=u_old)
        except NumericalError as exc:
            raise NumericalError(f"iteration {n}: {exc}", residual=exc.residual, iteration=n) from exc

        gradu = gradient(mesh, geom, u)
        w = eta + r * gradu
        try:
            nu = update_nu(eta, gradu, p, r, cfg.scalar_tol, cfg.scalar_method, guess=np.hypot(nu[:, 0], nu[:, 1]))
        except NumericalError as exc:
            raise NumericalError(f"iteration {n}: {exc}", iteration=n, element=exc.element) from exc
        eta_old = eta
        eta = eta + r * (gradu - nu)
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(eta))):
            raise NumericalError(f"iteration {n}: non-finite values, the iteration diverged", iteration=n)

        relerr = relative_error(u, u_old)
        history.append(relerr)
        u_old = u
        if cfg.verbose:
            print(f"iter={n} relerr={relerr:.6e} time={time.perf_counter() - t_start:.3f}", file=sys.stderr)
        if callback is not None:
            callback(
                dict(iteration=n, u=u, gradu=gradu, eta_old=eta_old, eta=eta, nu=nu, w=w, exponent=p, relerr=relerr)
            )
        if relerr <= cfg.epsilon:
            converged = True
            break

    return SolveReport(
        u=u_old,
        iterations=len(history),
        relative_errors=np.array(history),
        converged=converged,
        wall_time=time.perf_counter() - t_start,
        final_nu=nu,
        final_eta=eta,
        exponent=p,
        setup_time=setup_time,
    )
