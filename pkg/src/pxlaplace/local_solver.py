"""Elementwise solution of |nu|^(p-2) nu + r nu = w.

Taking norms reduces the vector equation to the scalar one
``x^(s-1) + r x = rho`` with ``x = |nu|``, ``rho = |w|`` and ``s = p``; the
left side is strictly increasing on [0, inf) so the root is unique, and
``nu = w x / rho`` (equivalently ``w / (x^(s-2) + r)``).
"""

import numpy as np

from .errors import ConfigurationError, NumericalError

DEFAULT_TOL = 1e-12
MAX_ITERATIONS = 200
GUESS_WIDTH = 1e-6
_COLLAPSE = 4.5e-16  # about two ulps, relative
METHODS = ("bisection", "newton")


def scalar_residual(x, s, r, rho):
    return np.power(x, s - 1.0) + r * x - rho


def _upper_bound(s, r, rho):
    # both terms are nonnegative, so each alone bounds the root
    with np.errstate(divide="ignore", over="ignore"):
        return np.minimum(rho / r, np.power(rho, 1.0 / (s - 1.0)))


def solve_scalar_array(s, r, rho, tol=DEFAULT_TOL, method="bisection", guess=None):
    """Vectorised root of ``x^(s-1) + r x = rho`` on ``x >= 0``.

    ``s`` and ``rho`` broadcast together; ``r`` is a positive scalar. Each
    root satisfies ``|residual| <= tol * max(1, rho)`` unless the bracket has
    shrunk to adjacent floats first: then the residual is at floating-point
    resolution, or the root itself underflows (tiny ``rho`` with ``s`` near 1)
    and the nearest representable value is returned. ``s = 2`` is solved in
    closed form.

    ``guess`` (e.g. the roots from a previous, nearby solve) is probed at
    relative distance ``GUESS_WIDTH`` on both sides; the sign checks can only
    narrow the starting bracket ``[0, min(rho/r, rho^(1/(s-1)))]``, so a bad
    guess costs two evaluations and nothing else.
    """
    if method not in METHODS:
        raise ConfigurationError(f"unknown scalar method {method!r}; choose from {METHODS}")
    if not r > 0:
        raise ConfigurationError(f"r must be positive, got {r!r}")
    if not tol > 0:
        raise ConfigurationError(f"tol must be positive, got {tol!r}")
    s, rho = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(rho, dtype=float))
    shape = s.shape
    s, rho = s.ravel(), rho.ravel()
    if np.any(~(s > 1)):
        raise ConfigurationError("exponent s must exceed 1")
    if np.any(~(rho >= 0)) or not np.all(np.isfinite(rho)):
        raise ConfigurationError("rho must be finite and nonnegative")

    s1 = s - 1.0
    lo = np.zeros_like(rho)
    hi = _upper_bound(s, r, rho)
    thresh = tol * np.maximum(1.0, rho)
    done = rho == 0
    linear = s == 2.0

    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        if guess is not None:
            g = np.clip(np.broadcast_to(np.asarray(guess, dtype=float), shape).ravel(), 0.0, hi)
            for probe in (g * (1.0 - GUESS_WIDTH), np.minimum(g * (1.0 + GUESS_WIDTH), hi)):
                f = np.power(probe, s1) + r * probe - rho
                np.copyto(lo, probe, where=(f < 0) & (probe > lo))
                np.copyto(hi, probe, where=(f > 0) & (probe < hi))
        if method == "newton":
            x, done = _newton(s1, r, rho, lo, hi, thresh, done | linear)
        else:
            x, done = _bisect(s1, r, rho, lo, hi, thresh, done | linear)
        # s = 2 is linear; use the closed form
        np.copyto(x, rho / (1.0 + r), where=linear)

    if not np.all(done):
        worst = int(np.flatnonzero(~done)[0])
        raise NumericalError(
            f"scalar solve did not converge in {MAX_ITERATIONS} iterations",
            residual=float(abs(scalar_residual(x[worst], s[worst], r, rho[worst]))),
            element=worst,
        )
    return x.reshape(shape)


def _bisect(s1, r, rho, lo, hi, thresh, done):
    # full-array sweeps with in-place updates; finished entries are frozen
    # through the ``done`` mask rather than compacted away
    x = np.zeros_like(rho)
    mid = np.empty_like(rho)
    f = np.empty_like(rho)
    for _ in range(MAX_ITERATIONS):
        if done.all():
            break
        np.add(lo, hi, out=mid)
        mid *= 0.5
        # no float strictly inside the bracket: happens when the root is
        # below the smallest subnormal
        stuck = (mid <= lo) | (mid >= hi)
        np.power(mid, s1, out=f)
        f += r * mid
        f -= rho
        neg = f < 0
        np.copyto(lo, mid, where=neg)
        np.copyto(hi, mid, where=~neg)
        newly = ~done & ((np.abs(f) <= thresh) | (hi - lo <= _COLLAPSE * hi) | stuck)
        np.copyto(x, mid, where=newly)
        done |= newly
    return x, done


def _newton(s1, r, rho, lo, hi, thresh, done):
    # Newton from the upper end of the bracket; any step leaving the current
    # sign-verified bracket is replaced by its midpoint
    x = np.where(done, 0.0, hi)
    for _ in range(MAX_ITERATIONS):
        if done.all():
            break
        pw = np.power(x, s1 - 1.0)
        f = x * pw + r * x - rho
        slope = s1 * pw + r
        np.copyto(lo, x, where=f < 0)
        np.copyto(hi, x, where=f > 0)
        newly = ~done & ((np.abs(f) <= thresh) | (hi - lo <= _COLLAPSE * hi))
        done |= newly
        step = x - f / slope
        step = np.where((step > lo) & (step < hi), step, 0.5 * (lo + hi))
        stuck = step == x
        np.copyto(x, step, where=~done)
        done |= stuck
    return x, done


def solve_scalar(s, r, rho, tol=DEFAULT_TOL, method="bisection"):
    """Unique ``x >= 0`` with ``x^(s-1) + r x = rho``; ``rho = 0`` gives 0."""
    return float(solve_scalar_array(s, r, rho, tol, method))


def update_nu(eta, gradu, p, r=1.0, tol=DEFAULT_TOL, method="bisection", guess=None):
    """Per triangle, the ``nu`` solving ``|nu|^(p-2) nu + r nu = eta + r grad u``.

    ``guess`` is an optional estimate of ``|nu|`` per triangle, see
    :func:`solve_scalar_array`.
    """
    w = np.asarray(eta, dtype=float) + r * np.asarray(gradu, dtype=float)
    rho = np.hypot(w[:, 0], w[:, 1])
    try:
        x = solve_scalar_array(p, r, rho, tol, method, guess)
    except NumericalError as exc:
        raise NumericalError(f"nu update failed on triangle {exc.element}: {exc}", element=exc.element) from exc
    scale = np.divide(x, rho, out=np.zeros_like(rho), where=rho > 0)
    return w * scale[:, None]


def nu_residual(nu, w, p, r=1.0):
    """Euclidean norm of ``|nu|^(p-2) nu + r nu - w`` per triangle."""
    nu = np.asarray(nu, dtype=float)
    n = np.hypot(nu[:, 0], nu[:, 1])
    with np.errstate(divide="ignore", invalid="ignore"):
        coef = np.where(n > 0, np.power(n, np.asarray(p) - 2.0), 0.0)
    res = coef[:, None] * nu + r * nu - np.asarray(w)
    return np.hypot(res[:, 0], res[:, 1])
