"""Fredholm and Witten indices of d/dt + A(t) via spectral shift functions."""

__version__ = "0.1.0"

from .linalg import (
    EigenDecomposition,
    BranchedLogValue,
    eigh,
    spectrum,
    matrix_function,
    count_below,
    signed_counts,
    logdet_tracked,
)
from .stepfun import StepFunction, SampledFunction
from .ssf import (
    ssf_pair,
    xi_left_right_at,
    perturbation_determinant,
    ssf_via_logdet,
    index_counting,
)
from .model import (
    OperatorPath,
    DiscretizedModel,
    build_path,
    discretize,
    delta_r,
    delta_s,
    resolvent_trace_check,
    fredholm_check,
    essential_spectrum_strips,
    kernel_dims,
    ssf_H_discrete,
)
from .transforms import (
    op_S,
    op_T,
    op_T_complex,
    pushnitski_forward,
    abel_F,
    abel_Fprime,
    trace_relation_check,
    lebesgue_classify,
)
from .rankone import (
    DiscreteMeasure,
    borel_transform,
    F_alpha,
    xi_alpha,
    matrix_oracle,
    classify_spectral_type,
    prescribed_ssf_demo,
)
from .witten import (
    witten_from_ssf,
    witten_resolvent,
    witten_semigroup,
    laplace_consistency,
    full_report,
)

__all__ = [
    "EigenDecomposition",
    "BranchedLogValue",
    "eigh",
    "spectrum",
    "matrix_function",
    "count_below",
    "signed_counts",
    "logdet_tracked",
    "StepFunction",
    "SampledFunction",
    "ssf_pair",
    "xi_left_right_at",
    "perturbation_determinant",
    "ssf_via_logdet",
    "index_counting",
    "OperatorPath",
    "DiscretizedModel",
    "build_path",
    "discretize",
    "delta_r",
    "delta_s",
    "resolvent_trace_check",
    "fredholm_check",
    "essential_spectrum_strips",
    "kernel_dims",
    "ssf_H_discrete",
    "op_S",
    "op_T",
    "op_T_complex",
    "pushnitski_forward",
    "abel_F",
    "abel_Fprime",
    "trace_relation_check",
    "lebesgue_classify",
    "DiscreteMeasure",
    "borel_transform",
    "F_alpha",
    "xi_alpha",
    "matrix_oracle",
    "classify_spectral_type",
    "prescribed_ssf_demo",
    "witten_from_ssf",
    "witten_resolvent",
    "witten_semigroup",
    "laplace_consistency",
    "full_report",
]
