"""Command line entry point: ``pxlaplace --example N | --config PATH [options]``."""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .dc_solver import SolverConfig, iterate
from .errors import (
    ConfigurationError,
    EvaluationError,
    ExpressionSyntaxError,
    MeshError,
    NumericalError,
    ProblemDefinitionError,
)
from .expr import parse
from .mesh import element_geometry
from .norms import error_report
from .problem import builtin_example, load_config
from .writers import write_csv, write_vtk

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2
EXIT_NOT_CONVERGED = 3
EXIT_NUMERICAL = 4

# config-file spellings of the solver settings
_CONFIG_KEYS = {
    "epsilon": ("epsilon", float),
    "eps": ("epsilon", float),
    "max_iterations": ("max_iterations", int),
    "max_iters": ("max_iterations", int),
    "r": ("r", float),
    "seed": ("seed", int),
    "init_scale": ("init_scale", float),
    "linear_tol": ("linear_tol", float),
    "scalar_tol": ("scalar_tol", float),
    "linear_backend": ("linear_backend", str),
    "scalar_method": ("scalar_method", str),
}


def build_parser():
    ap = argparse.ArgumentParser(
        prog="pxlaplace",
        description="Solve -div(|grad u|^(p(x)-2) grad u) = f with u = g on the boundary "
        "by the decomposition-coordination method on P1 finite elements.",
        allow_abbrev=False,
    )
    src = ap.add_mutually_exclusive_group(required=True)
    src.add_argument("--example", type=int, metavar="N", help="built-in example 1-5")
    src.add_argument("--config", metavar="PATH", help="key = value problem file")
    ap.add_argument("--nx", type=int, help="cells in x (rectangular domains)")
    ap.add_argument("--ny", type=int, help="cells in y (rectangular domains)")
    ap.add_argument("--p", metavar="EXPR", help="exponent override (examples 1, 2, 4 or a config)")
    ap.add_argument("--eps", type=float, help="stopping tolerance on the relative change of u")
    ap.add_argument("--max-iters", type=int, help="iteration cap")
    ap.add_argument("--r", type=float, help="augmentation parameter")
    ap.add_argument("--seed", type=int, help="seed for the random start")
    ap.add_argument("--linear-backend", choices=("cg", "direct"))
    ap.add_argument("--scalar-method", choices=("bisection", "newton"))
    ap.add_argument("--out", metavar="PATH", help="write the nodal solution here")
    ap.add_argument("--format", choices=("csv", "vtk"), help="output format (default: from --out suffix, else csv)")
    ap.add_argument("--verbose", action="store_true", help="log every iteration to stderr")
    return ap


def _load_problem(args):
    """Returns (spec, solver overrides from the config file, output settings)."""
    if args.example is not None:
        p = args.p
        if p is not None and args.example in (1, 2):
            try:
                p = float(p)
            except ValueError as exc:
                raise ConfigurationError(f"example {args.example} needs a numeric --p, got {p!r}") from exc
        elif p is not None and args.example == 4:
            p = parse(p)
        spec = builtin_example(args.example, p=p)
        return spec, {}, {}

    spec, rest = load_config(args.config)
    if args.p is not None:
        spec = replace(spec, p_expr=parse(args.p))
    solver, output = {}, {}
    for key, value in rest.items():
        if key in ("out", "format"):
            output[key] = value
        elif key in _CONFIG_KEYS:
            field, conv = _CONFIG_KEYS[key]
            try:
                solver[field] = conv(value)
            except ValueError as exc:
                raise ConfigurationError(f"config key {key!r}: cannot parse {value!r}") from exc
        else:
            raise ConfigurationError(f"unknown config key {key!r}")
    return spec, solver, output


def _resolve(args):
    spec, solver, output = _load_problem(args)
    flags = {
        "epsilon": args.eps,
        "max_iterations": args.max_iters,
        "r": args.r,
        "seed": args.seed,
        "linear_backend": args.linear_backend,
        "scalar_method": args.scalar_method,
    }
    solver.update({k: v for k, v in flags.items() if v is not None})
    cfg = SolverConfig(verbose=args.verbose, **solver)

    out = args.out or output.get("out")
    fmt = args.format or output.get("format")
    if fmt is None:
        fmt = "vtk" if out and Path(out).suffix.lower() == ".vtk" else "csv"
    if fmt not in ("csv", "vtk"):
        raise ConfigurationError(f"unknown output format {fmt!r}")
    for name, v in (("nx", args.nx), ("ny", args.ny)):
        if v is not None and v < 1:
            raise ConfigurationError(f"--{name} must be a positive integer, got {v}")
    mesh = spec.build_mesh(args.nx, args.ny)
    return spec, mesh, cfg, out, fmt


def run(argv=None):
    args = build_parser().parse_args(argv)
    try:
        spec, mesh, cfg, out, fmt = _resolve(args)
    except (ConfigurationError, ExpressionSyntaxError, MeshError, ProblemDefinitionError, EvaluationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO

    try:
        geom = element_geometry(mesh)
        report = iterate(mesh, geom, spec, cfg)
    except (MeshError, ProblemDefinitionError, EvaluationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    status = "converged" if report.converged else "NOT converged"
    last = report.relative_errors[-1]
    print(f"problem:        {spec.name or 'custom'}")
    print(f"mesh:           {mesh.n_vertices} vertices, {mesh.n_elements} triangles")
    print(f"iterations:     {report.iterations} ({status}, eps={cfg.epsilon:g})")
    print(f"last rel. err:  {last:.3e}")
    print(f"wall time:      {report.wall_time:.2f} s")
    if spec.has_exact:
        errs = error_report(report.u, spec.exact_expr, mesh, geom, report.exponent)
        print(f"max error:      {errs.linf:.3e}")
        print(f"L^p(x) error:   {errs.lp:.3e}")

    if out:
        try:
            (write_vtk if fmt == "vtk" else write_csv)(mesh, report.u, out)
        except OSError as exc:
            print(f"error: cannot write {out}: {exc}", file=sys.stderr)
            return EXIT_IO
        print(f"wrote:          {out} ({fmt})")

    if not report.converged:
        print(f"error: no convergence within {cfg.max_iterations} iterations", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
