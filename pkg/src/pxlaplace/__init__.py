"""Finite element solver for the p(x)-Laplacian Dirichlet problem by the
decomposition-coordination (augmented Lagrangian) iteration."""

from .dc_solver import SolveReport, SolverConfig, gradient, iterate
from .errors import (
    ConfigurationError,
    EvaluationError,
    ExpressionSyntaxError,
    MeshError,
    NumericalError,
    ProblemDefinitionError,
    PxLaplaceError,
)
from .estimator import PxLaplaceSolver
from .expr import Expression, evaluate, parse
from .mesh import ElementGeometry, Mesh, element_geometry, generate_structured, read_mesh, write_mesh
from .problem import ProblemSpec, builtin_example, load_config, sample_exponent

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "ElementGeometry",
    "EvaluationError",
    "Expression",
    "ExpressionSyntaxError",
    "Mesh",
    "MeshError",
    "NumericalError",
    "ProblemDefinitionError",
    "ProblemSpec",
    "PxLaplaceError",
    "PxLaplaceSolver",
    "SolveReport",
    "SolverConfig",
    "builtin_example",
    "element_geometry",
    "evaluate",
    "generate_structured",
    "gradient",
    "iterate",
    "load_config",
    "parse",
    "read_mesh",
    "sample_exponent",
    "write_mesh",
]
