"""Simulation and bound-verification toolkit for the Gaussian approximation
of Hawkes-process innovations."""

from ._version import __version__
from .bounds import (
    BoundReport,
    bound_general_resolvent,
    bound_linear,
    bound_linear_approx,
    bound_linear_spectral,
    bound_linear_spectral_approx,
    bound_nonlinear,
    bound_nonlinear_approx,
    compare_conditions,
    evaluate_all,
    intensity_bracket,
)
from .chaos import (
    InnovationSample,
    approx_first_chaos,
    first_chaos,
    intensity_moment_integrals,
    weighted_intensity_integral,
)
from .errors import (
    ConfigError,
    HorizonError,
    NumericError,
    ParameterError,
    SimulationError,
    StabilityError,
    StatisticalError,
    TruncationError,
)
from .kernels import (
    ResolventTable,
    cross_energy,
    l1_norm,
    l2_norm,
    resolvent,
)
from .model import (
    BoxKernel,
    EventStream,
    ExponentialKernel,
    HawkesParams,
    LinearLink,
    SaturatingExpLink,
    TabulatedKernel,
    TanhLink,
    TestFunction,
    unit_variance_indicator,
)
from .simulator import (
    IntensityPath,
    SimConfig,
    default_burn_in,
    embedding_simulate,
    intensity_at,
    simulate,
)
from .stats import (
    ConfidenceInterval,
    SampleSet,
    bootstrap_w1_se,
    confidence_interval,
    empirical_w1_to_normal,
    kolmogorov_to_normal,
    normal_cdf,
    normal_pdf,
    normal_quantile,
)

__all__ = [name for name in dir() if not name.startswith("_")]
