"""Gaussian-covariate p-values for one candidate and for the best of q.

If q candidate covariates are independent Gaussian noise, their F
statistics against a fixed residual are i.i.d. F(1, n - k - 1), so the
probability that the largest exceeds ``f_max`` is ``1 - (1 - p)^q`` with
``p`` the single-candidate tail probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .specfun import FParams, f_sf


@dataclass(frozen=True)
class PValueResult:
    p_single: float
    p_adjusted: float
    q: int
    f_obs: float
    dendf: int


def _check_dendf(dendf):
    if dendf < 1:
        raise InvalidInputError(f"dendf must be at least 1, got {dendf}")


def p_single(f_obs, dendf: int):
    """Upper tail of F(1, dendf) at ``f_obs``; ``inf`` gives 0."""
    _check_dendf(dendf)
    return f_sf(FParams(1.0, float(dendf)), f_obs)


def adjust_best_of_q(p, q: int):
    """``1 - (1 - p)^q`` without cancellation for small p."""
    if q < 1 or int(q) != q:
        raise InvalidInputError(f"q must be a positive integer, got {q}")
    p = np.asarray(p, dtype=float)
    if q == 1:
        return float(p) if p.ndim == 0 else p.copy()
    with np.errstate(divide="ignore"):
        out = -np.expm1(q * np.log1p(-p))
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def p_best_of_q(f_max: float, dendf: int, q: int) -> PValueResult:
    if q < 1:
        raise InvalidInputError(f"q must be at least 1, got {q}")
    ps = p_single(f_max, dendf)
    return PValueResult(
        p_single=ps,
        p_adjusted=adjust_best_of_q(ps, q),
        q=int(q),
        f_obs=float(f_max),
        dendf=int(dendf),
    )
