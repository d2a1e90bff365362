"""Reflected maxmin (RMM) and maxmin copulas."""

from ._kernels import BACKEND
from .copula import (
    MaxminCopula,
    RmmCopula,
    boundary_curve,
    eval_maxmin,
    eval_rmm,
    frechet_bounds_check,
    level_curve,
    rectangle_volume,
    reflect_maxmin_to_rmm,
    reflect_rmm_to_maxmin,
)
from .diagonal import (
    DiagonalSection,
    diagonal_bounds,
    diagonal_of,
    in_D_hat,
    semilinear_from_diagonal,
    srmm_from_diagonal,
)
from .errors import (
    AnchorUndefinedError,
    GeneratorConditionError,
    InputFormatError,
    MathDomainError,
    NumericalNonconvergenceError,
    RmmError,
)
from .generator import Generator, MaxminGenerators, validate_generator, validate_maxmin
from .inference import (
    assemble_rmm_from_two_srmm,
    empirical_copula,
    find_u_min,
    recover_generator,
    recover_generator_up_to_scale,
)
from .measure import ac_mass, density, mass_decomposition, singular_mass
from .presets import CATALOG, get_preset
from .sampler import sample_maxmin, sample_rmm

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CATALOG", "AnchorUndefinedError", "DiagonalSection", "Generator",
    "GeneratorConditionError", "InputFormatError", "MathDomainError", "MaxminCopula",
    "MaxminGenerators", "NumericalNonconvergenceError", "RmmCopula", "RmmError",
    "ac_mass", "assemble_rmm_from_two_srmm", "boundary_curve", "density", "diagonal_bounds",
    "diagonal_of", "empirical_copula", "eval_maxmin", "eval_rmm", "find_u_min",
    "frechet_bounds_check", "get_preset", "in_D_hat", "level_curve", "mass_decomposition",
    "recover_generator", "recover_generator_up_to_scale", "rectangle_volume",
    "reflect_maxmin_to_rmm", "reflect_rmm_to_maxmin", "sample_maxmin", "sample_rmm",
    "semilinear_from_diagonal", "singular_mass", "srmm_from_diagonal", "validate_generator",
    "validate_maxmin",
]
