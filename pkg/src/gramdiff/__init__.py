"""Algebraic time-derivative estimation and Gramian-based deadbeat reconstruction."""

from .errors import (
    ConfigurationError,
    DomainError,
    ExcitationError,
    GramdiffError,
    InitializationError,
    NumericalError,
    RangeError,
)
from .expanding import (
    InfoFilterState,
    batch_expanding_estimate,
    info_filter_step,
    run_info_filter,
)
from .gramian import (
    GramianMatrix,
    WeightSpec,
    gramian_entries,
    gramian_inverse_closed,
    hilbert_inverse,
    transition,
    weighted_estimator_kernels,
    weighted_gramian,
)
from .identifier import RegressorSeries, identify, pe_metric, regressor_gramian
from .kernels import (
    KernelPoly,
    KernelSpec,
    build_algebraic_kernel,
    build_gramian_kernel,
    eval_kernel,
    kernels_equal,
    moment_matrix,
    reflection_check,
)
from .runtime import (
    FirTaps,
    StateVec,
    StreamingDifferentiator,
    differentiate_series,
    discretize_kernel,
    push_sample,
    reconstruct_state,
)
from .signals import NoiseSpec, SignalSeries, add_noise, error_metrics, gen_polynomial, gen_sine

__version__ = "0.1.0"
