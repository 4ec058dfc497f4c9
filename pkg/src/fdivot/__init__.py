"""Optimal transport regularized by Legendre-type f-divergences.

Generalized Sinkhorn solver, closed-form coupling recovery and the cost
transformation that moves a solved problem from one regularizer to another.
"""

from .errors import DomainError, FDivOTError, InputError, NumericalError, ParameterError
from .generators import CATALOGUE, Generator, make_generator, parse_generator
from .kernels import BACKEND
from .problem import (
    Coupling,
    DiscreteProblem,
    Potentials,
    check_admissible,
    divergence,
    dual_objective,
    marginal_residuals,
    optimality_residuals,
    primal_objective,
)
from .solver import SolveReport, SolverConfig, coordinate_update, recover_coupling, solve
from .transform import EquivalenceCertificate, TransformResult, transform_cost, verify_equivalence

__version__ = "0.1.0"
