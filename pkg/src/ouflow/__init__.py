"""Spectral flow on Ornstein-Uhlenbeck path space.

A one-parameter group of measure-preserving path transformations defined
by the unit-modulus frequency multiplier exp(-2i*u*arctan(2*lam)), with
two independent realizations (discrete spectral multiplier and explicit
atom + principal-value + smooth-density kernel), the covariance of the
induced two-parameter Gaussian field, exact stationary sampling, and an
ergodic-average harness.
"""

from ._backend import USING_NUMBA, backend_name
from .covariance import (
    CovarianceQuery,
    CovarianceTable,
    continuity_defect,
    cov,
    cov_table,
    empirical_cov,
)
from .ergodic import Observable, flow_average, time_average
from .flow import (
    FlowPlan,
    apply_flow,
    apply_flow_batch,
    apply_flow_periodic,
    group_law_defect,
    inner_product_decay,
)
from .gaussian import (
    FieldSample,
    RngStream,
    field_vs_flow_check,
    sample_field,
    sample_field_batch,
    sample_ou,
    sample_ou_batch,
    sample_ou_circle,
)
from .kernel import (
    KernelDecomposition,
    apply_fractional_kernel,
    decompose,
    ode_residual,
    phi_eval,
    smooth_part_mass,
    theta_eval,
)
from .paths import (
    OuPath,
    TimeGrid,
    WienerPath,
    brownian_scale,
    ou_sobolev_norm,
    ou_sobolev_norm_spectral,
    ou_sup_norm,
    to_ou,
    to_wiener,
    translate,
    wiener_dirichlet_norm,
    wiener_sup_norm,
)
from .specfun import (
    Multiplier,
    digamma,
    laguerre,
    laguerre_deriv,
    multiplier_eval,
    pochhammer,
)
from .transform import (
    SignedKernelMeasure,
    apply_signed_kernel,
    integer_kernel,
    step_transform,
    wiener_step_transform,
)

__all__ = [
    "USING_NUMBA",
    "backend_name",
    "TimeGrid",
    "OuPath",
    "WienerPath",
    "to_ou",
    "to_wiener",
    "brownian_scale",
    "translate",
    "ou_sobolev_norm",
    "ou_sobolev_norm_spectral",
    "ou_sup_norm",
    "wiener_dirichlet_norm",
    "wiener_sup_norm",
    "Multiplier",
    "digamma",
    "laguerre",
    "laguerre_deriv",
    "multiplier_eval",
    "pochhammer",
    "SignedKernelMeasure",
    "integer_kernel",
    "apply_signed_kernel",
    "step_transform",
    "wiener_step_transform",
    "KernelDecomposition",
    "decompose",
    "phi_eval",
    "theta_eval",
    "smooth_part_mass",
    "apply_fractional_kernel",
    "ode_residual",
    "FlowPlan",
    "apply_flow",
    "apply_flow_batch",
    "apply_flow_periodic",
    "group_law_defect",
    "inner_product_decay",
    "CovarianceQuery",
    "CovarianceTable",
    "cov",
    "cov_table",
    "continuity_defect",
    "empirical_cov",
    "RngStream",
    "FieldSample",
    "sample_ou",
    "sample_ou_batch",
    "sample_ou_circle",
    "sample_field",
    "sample_field_batch",
    "field_vs_flow_check",
    "Observable",
    "time_average",
    "flow_average",
]

__version__ = "0.1.0"
