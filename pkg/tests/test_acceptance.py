"""Acceptance runs on the five reference problems at 100 x 100.

Each test prints one ``criterion N: PASS|FAIL ...`` line (visible without
``-s``) and then asserts. The full module takes several minutes.
"""

import numpy as np
import pytest
import scipy.sparse.linalg as spla
from _oracles import newton_oracle

from pxlaplace import ProblemSpec, SolverConfig, builtin_example, gradient, iterate
from pxlaplace.assembly import assemble_load, assemble_stiffness, impose_dirichlet
from pxlaplace.local_solver import nu_residual, scalar_residual, solve_scalar_array
from pxlaplace.mesh import Mesh, element_geometry, generate_structured
from pxlaplace.norms import error_report, lp_norm

pytestmark = pytest.mark.slow

N = 100
TIME_LIMIT = 300.0
P_SWEEP = (1.15, 4.0, 50.0)


def _report(capsys, n, ok, detail):
    with capsys.disabled():
        print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


def _run(spec, nx=N, ny=N, **cfg):
    mesh = spec.build_mesh(nx, ny)
    geom = element_geometry(mesh)
    rep = iterate(mesh, geom, spec, SolverConfig(**cfg))
    return mesh, geom, rep


@pytest.fixture(scope="module")
def runs():
    """Lazily computed 100 x 100 runs, shared by the criteria."""
    cache = {}

    def get(key):
        if key not in cache:
            ex, p = key
            cache[key] = _run(builtin_example(ex, p=p))
        return cache[key]

    return get


def _errors(key, runs):
    mesh, geom, rep = runs(key)
    spec = builtin_example(*key)
    return rep, error_report(rep.u, spec.exact_expr, mesh, geom, rep.exponent)


def test_criterion_1_example1(runs, capsys):
    rep, err = _errors((1, None), runs)
    ok = err.linf <= 6e-3 and err.lp <= 3e-3
    _report(capsys, 1, ok, f"max err {err.linf:.3e} <= 6e-3, Lp err {err.lp:.3e} <= 3e-3 ({rep.iterations} it)")
    assert ok


def test_criterion_2_example2(runs, capsys):
    rep, err = _errors((2, None), runs)
    ok = err.linf <= 6e-4 and err.lp <= 9e-4
    _report(
        capsys,
        2,
        ok,
        f"max err {err.linf:.3e} <= 6e-4, Lp err {err.lp:.3e} <= 9e-4 "
        f"({rep.iterations} it, converged={rep.converged}, last rel. change {rep.relative_errors[-1]:.2e})",
    )
    assert ok


def test_criterion_3_example3(runs, capsys):
    rep, err = _errors((3, None), runs)
    ok = err.linf <= 5e-5 and 2.7e-5 <= err.lp <= 2.7e-3
    _report(capsys, 3, ok, f"max err {err.linf:.3e} <= 5e-5, Lp(x) err {err.lp:.3e} in [2.7e-5, 2.7e-3]")
    assert ok


def test_criterion_4_example4(runs, capsys):
    maxima = [runs((4, p))[2].u.max() for p in P_SWEEP]
    increasing = all(a < b for a, b in zip(maxima, maxima[1:]))
    mesh, _, rep = runs((4, 50.0))
    xy = mesh.vertex_coordinates
    on_axis = np.abs(xy[:, 1]) < 1e-12
    profile = np.abs(rep.u[on_axis] - (1 - np.abs(xy[on_axis, 0]))).max()
    ok = increasing and profile <= 0.15
    shown = ", ".join(f"p={p:g}: {m:.4f}" for p, m in zip(P_SWEEP, maxima))
    _report(capsys, 4, ok, f"max u ({shown}) strictly increasing; p=50 profile err {profile:.3f} <= 0.15")
    assert ok


def test_criterion_5_example5(runs, capsys):
    mesh, _, rep = runs((5, None))
    x = mesh.vertex_coordinates[:, 0]
    left, right = rep.u[x <= -0.5].max(), rep.u[x >= 0.5].max()
    ok = left < right
    _report(capsys, 5, ok, f"max u on x<=-0.5 {left:.4f} < max u on x>=0.5 {right:.4f}")
    assert ok


def test_criterion_6_p2_equivalence(capsys):
    spec = ProblemSpec("2", "1", "0", domain=(0, 1, 0, 1))
    mesh, geom, rep = _run(spec, 32, 32)
    A_e, b = impose_dirichlet(assemble_stiffness(mesh, geom), assemble_load(mesh, geom, spec.f_expr), mesh, spec.g_expr)
    diff = np.abs(rep.u - spla.spsolve(A_e.tocsc(), b)).max()
    ok = rep.converged and diff <= 1e-6
    _report(capsys, 6, ok, f"converged={rep.converged} in {rep.iterations} it, max diff to Poisson {diff:.2e} <= 1e-6")
    assert ok


def _skewed_mesh():
    base = generate_structured(-1, 2, 0, 1.5, 9, 7)
    xy = base.vertex_coordinates.copy()
    xy[base.interior_nodes] += np.random.default_rng(1).uniform(-0.06, 0.06, (len(base.interior_nodes), 2))
    mesh = Mesh(xy, base.elem_vertices, base.dirichlet_nodes)
    return mesh, element_geometry(mesh)


def _stiffness_ok():
    mesh, geom = _skewed_mesh()
    A = assemble_stiffness(mesh, geom)
    return np.abs(A.sum(axis=1)).max() <= 1e-12 and abs(A - A.T).max() == 0


def _affine_ok():
    mesh, geom = _skewed_mesh()
    xy = mesh.vertex_coordinates
    g = gradient(mesh, geom, 3 * xy[:, 0] - 2 * xy[:, 1] + 7)
    return np.abs(g - [3.0, -2.0]).max() <= 1e-12


def _nu_residual_worst():
    worst = 0.0

    def check(state):
        nonlocal worst
        worst = max(worst, float(nu_residual(state["nu"], state["w"], state["exponent"], 1.0).max()))

    for ex in range(1, 6):
        spec = builtin_example(ex)
        mesh = spec.build_mesh(16, 16)
        iterate(mesh, element_geometry(mesh), spec, callback=check)
    return worst


def _scalar_ok():
    rng = np.random.default_rng(7)
    s = rng.uniform(1.0, 50.0, 1000)
    s[s == 1.0] = 1.5
    rho = rng.uniform(0.0, 100.0, 1000)
    oracle = np.array([newton_oracle(a, 1.0, b) for a, b in zip(s, rho)])
    for method in ("bisection", "newton"):
        x = solve_scalar_array(s, 1.0, rho, method=method)
        if not np.all(np.abs(scalar_residual(x, s, 1.0, rho)) <= 1e-12 * np.maximum(1.0, rho)):
            return False
        if not np.all(np.abs(x - oracle) <= 1e-10):
            return False
        # larger right-hand side, larger root
        x2 = solve_scalar_array(s, 1.0, rho * 1.5 + 1e-3, method=method)
        if not np.all(x2 > x):
            return False
    return True


def _luxemburg_ok():
    mesh, geom = _skewed_mesh()
    rng = np.random.default_rng(3)
    e = rng.standard_normal(mesh.n_elements)
    p = rng.uniform(1.1, 20, mesh.n_elements)
    hom = all(abs(lp_norm(t * e, p, geom) - t * lp_norm(e, p, geom)) <= 1e-10 * t * lp_norm(e, p, geom) for t in (1e-4, 0.3, 7.0, 1e5))
    const = all(
        abs(lp_norm(e, q, geom) - np.sum(geom.area * np.abs(e) ** q) ** (1 / q)) <= 1e-10 * lp_norm(e, q, geom)
        for q in (1.1, 2.0, 5.0, 20.0)
    )
    return hom and const


def test_criterion_7_properties(capsys):
    worst = _nu_residual_worst()
    checks = {
        "stiffness": _stiffness_ok(),
        "affine-gradient": _affine_ok(),
        "nu-residual": worst <= 1e-10,
        "scalar-oracle": _scalar_ok(),
        "luxemburg": _luxemburg_ok(),
    }
    ok = all(checks.values())
    shown = ", ".join(f"{k} {'ok' if v else 'FAILED'}" for k, v in checks.items())
    _report(capsys, 7, ok, f"{shown} (worst nu residual {worst:.1e})")
    assert ok


def test_criterion_8_timing(runs, capsys):
    keys = [(1, None), (2, None), (3, None)] + [(4, p) for p in P_SWEEP] + [(5, None)]
    times = {k: runs(k)[2].wall_time for k in keys}
    ok = all(t <= TIME_LIMIT for t in times.values())
    shown = ", ".join(f"ex{k[0]}{'' if k[1] is None else f' p={k[1]:g}'}: {t:.1f}s" for k, t in times.items())
    _report(capsys, 8, ok, f"wall times <= {TIME_LIMIT:g}s ({shown})")
    assert ok
