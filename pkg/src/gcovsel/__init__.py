"""Gaussian-covariate p-values for greedy forward selection in linear regression."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AccuracyError,
    CollinearityError,
    DataFormatError,
    DegenerateInputError,
    DegreesOfFreedomError,
    DomainError,
    GcovError,
    InvalidInputError,
)
from .linmodel import Dataset, RegressionState, add_covariate, init_state, residualize  # noqa: E402
from .pvalue import PValueResult, p_best_of_q, p_single  # noqa: E402
from .selection import SelectionConfig, SelectionTrace, forward_select  # noqa: E402
from .specfun import BetaParams, FParams, beta_cdf, beta_f_bridge, f_cdf  # noqa: E402
from .statistic import StatResult, compute_B, compute_stat  # noqa: E402
