"""Truncated nu-fractional calculus built on the extended Mittag-Leffler function."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConvergenceError,
    DomainError,
    IoError,
    NonDifferentiableError,
    NuCalcError,
    ParseError,
    PoleError,
    SearchFailure,
    UnsupportedRegimeError,
    ValidationError,
)
from .expr import EvalPair, FnHandle, parse  # noqa: E402
from .mittag_leffler import (  # noqa: E402
    SeriesControl,
    SeriesResult,
    ml1,
    ml2,
    ml3,
    ml_extended,
    ml_extended_gen,
    ml_truncated,
    s_truncated,
)
from .nu_calculus import (  # noqa: E402
    DerivResult,
    EpsilonSchedule,
    closed_form_deriv,
    compose_deriv,
    deriv_chain,
    deriv_limit,
    deriv_ml2,
    deriv_ml2_n,
    deriv_n,
    integral,
    integral_ml2,
    integral_power_kernel,
)
from .quadrature import QuadratureControl  # noqa: E402
from .special_functions import (  # noqa: E402
    CANONICAL,
    MLParams,
    beta_fn,
    extended_beta,
    gamma_fn,
    log_gamma,
    nu_constant,
    pochhammer,
)
