"""Problem instances for -div(|grad u|^(p(x)-2) grad u) = f, u = g on the boundary."""

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, EvaluationError, ExpressionSyntaxError, ProblemDefinitionError
from .expr import Expression, parse
from .mesh import generate_structured, read_mesh

DEFAULT_RESOLUTION = 100


@dataclass(frozen=True)
class ProblemSpec:
    """Exponent, source and boundary data as expressions in ``x`` and ``y``.

    ``domain`` is either a ``(xmin, xmax, ymin, ymax)`` rectangle or a path
    to a mesh file; ``nx``/``ny`` only apply to rectangles.
    """

    p_expr: Expression
    f_expr: Expression
    g_expr: Expression
    exact_expr: Expression | None = None
    domain: tuple | str = (0.0, 1.0, 0.0, 1.0)
    nx: int = DEFAULT_RESOLUTION
    ny: int = DEFAULT_RESOLUTION
    name: str = field(default="", compare=False)

    def __post_init__(self):
        for attr in ("p_expr", "f_expr", "g_expr", "exact_expr"):
            value = getattr(self, attr)
            if value is not None and not isinstance(value, Expression):
                object.__setattr__(self, attr, parse(value))
        if not isinstance(self.domain, (str, Path)):
            dom = tuple(float(v) for v in self.domain)
            if len(dom) != 4:
                raise ConfigurationError(f"domain needs 4 numbers (xmin xmax ymin ymax), got {len(dom)}")
            object.__setattr__(self, "domain", dom)
        else:
            object.__setattr__(self, "domain", str(self.domain))

    @property
    def has_exact(self):
        return self.exact_expr is not None

    def build_mesh(self, nx=None, ny=None):
        if isinstance(self.domain, str):
            return read_mesh(self.domain)
        return generate_structured(*self.domain, self.nx if nx is None else nx, self.ny if ny is None else ny)


def sample_exponent(spec, geom):
    """Exponent held constant on each triangle, taken at its barycenter."""
    bc = geom.barycenter
    p = np.broadcast_to(spec.p_expr(bc[:, 0], bc[:, 1]), (len(bc),)).astype(float)
    bad = np.flatnonzero(~(p > 1))
    if bad.size:
        t = int(bad[0])
        raise ProblemDefinitionError(
            f"exponent must exceed 1; p = {p[t]!r} on triangle {t} "
            f"(barycenter {bc[t, 0]!r}, {bc[t, 1]!r})",
            element=t,
        )
    p.setflags(write=False)
    return p


def _num(v):
    return repr(float(v))


def builtin_example(example_id, p=None):
    """The five reference problems.

    ``p`` overrides the constant exponent of examples 1, 2 and 4 (defaults
    20, 1.1 and 4). Examples 3 and 5 have fixed variable exponents.
    """
    if example_id == 1:
        q = 20.0 if p is None else float(p)
        _check_constant_p(q)
        exact = f"(x^2 + y^2)^(({_num(q)} - 2)/(2*{_num(q)} - 2))"
        return ProblemSpec(_num(q), "0", exact, exact, (0.0, 1.0, 0.0, 1.0), name="example 1")
    if example_id == 2:
        q = 1.1 if p is None else float(p)
        _check_constant_p(q)
        c = f"(({_num(q)} - 1)/{_num(q)}) * 2^(-1/({_num(q)} - 1))"
        exact = f"{c} * (1 - (x^2 + y^2)^({_num(q)}/(2*{_num(q)} - 2)))"
        h = 1.0 / math.sqrt(2.0)
        return ProblemSpec(_num(q), "1", exact, exact, (-h, h, -h, h), name="example 2")
    if example_id == 3:
        if p is not None:
            raise ConfigurationError("example 3 has a fixed variable exponent; p cannot be overridden")
        exact = "sqrt(2)*exp(2)*(exp(0.5*(x + y)) - 1)"
        return ProblemSpec("1 + 1/((x + y)/2 + 2)", "0", exact, exact, (-1.0, 1.0, -1.0, 1.0), name="example 3")
    if example_id == 4:
        q = 4.0 if p is None else p
        p_expr = parse(_num(q) if isinstance(q, (int, float)) else q)
        return ProblemSpec(p_expr, "1", "0", None, (-1.0, 1.0, -1.0, 1.0), name="example 4")
    if example_id == 5:
        if p is not None:
            raise ConfigurationError("example 5 has a fixed discontinuous exponent; p cannot be overridden")
        return ProblemSpec("if(x <= 0, 1.2, 4)", "1", "0", None, (-2.0, 2.0, -1.0, 1.0), name="example 5")
    raise ConfigurationError(f"unknown example {example_id!r}; choose 1 to 5")


def _check_constant_p(q):
    if not q > 1 or not math.isfinite(q):
        raise ProblemDefinitionError(f"exponent must be a finite number > 1, got {q!r}")


# config keys that belong to the problem; everything else is passed through
_PROBLEM_KEYS = {"p", "f", "g", "exact", "domain", "mesh", "nx", "ny"}


def read_config(path):
    """Parse a ``key = value`` file. ``#`` starts a comment."""
    entries = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip().lower(), value.strip()
        if not sep or not key:
            raise ConfigurationError(f"{path}:{lineno}: expected 'key = value'")
        if key in entries:
            raise ConfigurationError(f"{path}:{lineno}: duplicate key {key!r}")
        entries[key] = value
    return entries


def problem_from_config(entries, base_dir=None):
    """Split config entries into a :class:`ProblemSpec` and the remaining
    (solver/CLI) keys."""
    missing = [k for k in ("p", "f", "g") if k not in entries]
    if missing:
        raise ConfigurationError(f"config is missing required key(s): {', '.join(missing)}")
    if "mesh" in entries and "domain" in entries:
        raise ConfigurationError("config may give 'domain' or 'mesh', not both")
    if "mesh" in entries:
        domain = Path(entries["mesh"])
        if base_dir is not None and not domain.is_absolute():
            domain = Path(base_dir) / domain
        domain = str(domain)
    elif "domain" in entries:
        try:
            domain = tuple(float(v) for v in entries["domain"].split())
        except ValueError as exc:
            raise ConfigurationError(f"bad domain {entries['domain']!r}") from exc
    else:
        raise ConfigurationError("config needs either 'domain = xmin xmax ymin ymax' or 'mesh = PATH'")

    sizes = {}
    for key in ("nx", "ny"):
        if key in entries:
            try:
                sizes[key] = int(entries[key])
            except ValueError as exc:
                raise ConfigurationError(f"{key} must be an integer, got {entries[key]!r}") from exc

    try:
        spec = ProblemSpec(
            entries["p"], entries["f"], entries["g"], entries.get("exact"), domain, **sizes, name="config"
        )
    except ExpressionSyntaxError as exc:
        raise ConfigurationError(f"in expression {exc.source!r}: {exc}") from exc
    rest = {k: v for k, v in entries.items() if k not in _PROBLEM_KEYS}
    return spec, rest


def load_config(path):
    entries = read_config(path)
    return problem_from_config(entries, base_dir=Path(path).parent)


def boundary_values(spec, mesh):
    """Dirichlet data evaluated at the mesh's boundary vertices."""
    xy = mesh.vertex_coordinates[mesh.dirichlet_nodes]
    try:
        g = spec.g_expr(xy[:, 0], xy[:, 1])
    except EvaluationError as exc:
        raise EvaluationError(f"boundary data: {exc}") from exc
    return np.broadcast_to(g, (len(xy),)).astype(float)
