"""Error measures: nodal max error, Luxemburg L^p(x) norm, relative change."""

from dataclasses import dataclass

import numpy as np

ZERO_GUARD = 1e-14
LUXEMBURG_RTOL = 1e-12


@dataclass(frozen=True)
class ErrorReport:
    linf: float
    lp: float
    relative: float | None = None


def linf_error(u_h, exact, mesh):
    xy = mesh.vertex_coordinates
    ex = np.broadcast_to(exact(xy[:, 0], xy[:, 1]), (mesh.n_vertices,))
    return float(np.max(np.abs(np.asarray(u_h) - ex)))


def barycenter_error(u_h, exact, mesh, geom):
    """u_h - exact at each barycenter; u_h there is the mean of its vertex values."""
    uh_bc = np.asarray(u_h)[mesh.elem_vertices].mean(axis=1)
    bc = geom.barycenter
    return uh_bc - np.broadcast_to(exact(bc[:, 0], bc[:, 1]), (mesh.n_elements,))


def _modular(log_lambda, log_e, p, area):
    # sum |T| |e_T / lambda|^p_T, evaluated in logs so that p = 50 cannot overflow
    with np.errstate(over="ignore"):
        return float(np.sum(area * np.exp(p * (log_e - log_lambda))))


def lp_norm(e, p, geom):
    """Luxemburg norm of the elementwise constant function ``e``:
    the ``lambda`` with ``sum_T |T| |e_T / lambda|^p_T = 1``.

    ``p`` may be a scalar or one exponent per triangle. Bisection on
    ``log(lambda)``, after scaling ``e`` to unit max so the bracket does not
    depend on the magnitude of the error.
    """
    e = np.abs(np.asarray(e, dtype=float))
    area = geom.area
    p = np.broadcast_to(np.asarray(p, dtype=float), e.shape)
    emax = float(e.max(initial=0.0))
    if emax == 0.0:
        return 0.0
    nz = e > 0
    log_e = np.log(e[nz] / emax)
    p_nz, area_nz = p[nz], area[nz]

    # at lambda = |T*|^(1/p*) / 2 the largest entry alone pushes the modular
    # above 1; at lambda = |Omega| + 1 every term is small enough
    k = int(np.argmax(e))
    lo = np.log(0.5 * min(1.0, area[k] ** (1.0 / p[k])))
    hi = np.log(float(area.sum()) + 1.0)
    while hi - lo > LUXEMBURG_RTOL:
        mid = 0.5 * (lo + hi)
        if _modular(mid, log_e, p_nz, area_nz) > 1.0:
            lo = mid
        else:
            hi = mid
    return emax * float(np.exp(0.5 * (lo + hi)))


def relative_error(u_new, u_old):
    """``|u_new - u_old| / |u_new|`` in the Euclidean norm, falling back to the
    absolute difference when ``|u_new|`` is below 1e-14."""
    u_new = np.asarray(u_new, dtype=float)
    diff = float(np.linalg.norm(u_new - np.asarray(u_old, dtype=float)))
    denom = float(np.linalg.norm(u_new))
    if denom < ZERO_GUARD:
        return diff
    return diff / denom


def error_report(u_h, exact, mesh, geom, p):
    e = barycenter_error(u_h, exact, mesh, geom)
    return ErrorReport(linf=linf_error(u_h, exact, mesh), lp=lp_norm(e, p, geom))
