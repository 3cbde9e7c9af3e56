"""Numerics for the operators ``f -> f^(n) o phi`` on the Hardy space H^2.

Truncated power series, reproducing kernels, analytic self-maps of the unit
disk with their Nevanlinna counting functions, disk and circle quadrature,
finite realizations of the operators, and trend diagnostics for
boundedness, compactness and the Hilbert-Schmidt property.
"""
__version__ = "0.1.0"

from . import backend
from .criteria import (
    Diagnostic,
    boundedness_diagnostic,
    chain_check,
    compactness_diagnostic,
    derivative_growth_check,
    hs_bracket,
    hs_criterion,
    kappa,
    lemma31_bounds,
    lemma32_identity,
    leibniz_alphas,
    univalent_ratio_diagnostic,
)
from .errors import *  # noqa: F401,F403
from .kernels import KernelSpec, kernel_norm_sq, kernel_series, normalized_kernel, reproduce, tail_order
from .maps import (
    Affine,
    Blaschke,
    Compose,
    Contact,
    Mobius,
    Monomial,
    Poly,
    SelfMap,
    identity,
    preimages,
    to_series,
    validate_self_map,
    zero_map,
)
from .mapspec import parse_map, render
from .nevanlinna import (
    counting_function,
    counting_mass,
    counting_mass_from_norm,
    littlewood_paley_check,
    sub_mean_value_check,
)
from .operators import (
    OperatorHandle,
    apply,
    column_norm_sq,
    gram_matrix,
    hs_partial_sum,
    hs_sum_adaptive,
    kernel_image_norm_sq,
    norm_lower_bound,
)
from .quadrature import GridSpec, circle_mean, disk_integral, dyadic_radii, radial_limit
from .series import PowerSeries, compose, derivative, evaluate, h2_norm_sq, hinf_estimate
