"""Spectral collocation solver with boundary-condition-satisfying basis networks.

The trial solution of each benchmark is a boundary lifting plus a tensor
product of 1D Chebyshev/Fourier families that satisfy the homogenized
boundary conditions by construction; training minimizes the mean squared PDE
residual at interior collocation points.  A direct least-squares solve of the
same collocation system serves as the deterministic reference for every
trained result.
"""

from .basis import BasisFamily, BoundaryCondition, build_family, eval_basis, homogenize
from .chebyshev import CglRule, cgl_rule, discrete_inner_product, eval_T, eval_T_deriv
from .config import ResolvedConfig, TrainConfig, parse_config, resolve, serialize_config
from .geometry import DomainMap, param_to_physical, polar_derivative_factors, stretch_z
from .model import TensorModel, evaluate, load_checkpoint, partial, save_checkpoint, weight_gradient
from .problems import PROBLEM_NAMES, ProblemSpec, catalog, exact_solution, lifting_value, residual
from .trainer import RunReport, SampleSet, build_sample_set, loss, loss_gradient, train
from .verify import ErrorReport, convergence_study, error_norms, least_squares_oracle, test_grid

__version__ = "0.1.0"

__all__ = [
    "BasisFamily", "BoundaryCondition", "build_family", "eval_basis", "homogenize",
    "CglRule", "cgl_rule", "discrete_inner_product", "eval_T", "eval_T_deriv",
    "ResolvedConfig", "TrainConfig", "parse_config", "resolve", "serialize_config",
    "DomainMap", "param_to_physical", "polar_derivative_factors", "stretch_z",
    "TensorModel", "evaluate", "load_checkpoint", "partial", "save_checkpoint",
    "weight_gradient",
    "PROBLEM_NAMES", "ProblemSpec", "catalog", "exact_solution", "lifting_value",
    "residual",
    "RunReport", "SampleSet", "build_sample_set", "loss", "loss_gradient", "train",
    "ErrorReport", "convergence_study", "error_norms", "least_squares_oracle",
    "test_grid",
]
