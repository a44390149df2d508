"""The residual-sum-of-squares ratio B and the one-degree-of-freedom F.

``B = 1 - (r.s)^2 / (s.s * r.r)`` is the fraction of the residual sum of
squares left after regressing ``r`` on the single direction ``s``. It is
symmetric in its two arguments and unchanged by positive rescaling of
either, which is what makes Gaussian-covariate p-values exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, DegenerateInputError, InvalidInputError
from .specfun import beta_f_bridge

INF_F = math.inf
B_ZERO_CUTOFF = 1e-14
CLAMP_SLACK = 1e-12


@dataclass(frozen=True)
class StatResult:
    B: float
    F: float
    dendf: int


def _clamp(B):
    """Pull roundoff excursions within CLAMP_SLACK back into [0, 1]."""
    B = np.asarray(B, dtype=float)
    if np.any(B < -CLAMP_SLACK) or np.any(B > 1.0 + CLAMP_SLACK) or np.any(np.isnan(B)):
        raise AccuracyError("B statistic outside [0, 1] beyond roundoff slack")
    return np.clip(B, 0.0, 1.0)


def compute_B(r, s) -> float:
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    if r.shape != s.shape or r.ndim != 1:
        raise InvalidInputError(f"shape mismatch: {r.shape} vs {s.shape}")
    rr = float(r @ r)
    ss = float(s @ s)
    if rr == 0.0 or ss == 0.0:
        raise DegenerateInputError("B is undefined for a zero-norm vector")
    rs = float(r @ s)
    # rr * ss and ss * rr are the same IEEE product, so B(r, s) == B(s, r) bitwise.
    return float(_clamp(1.0 - rs * rs / (rr * ss)))


def compute_B_many(r, S) -> np.ndarray:
    """B of ``r`` against every column of ``S``."""
    r = np.asarray(r, dtype=float)
    S = np.asarray(S, dtype=float)
    rr = float(r @ r)
    ss = np.einsum("ij,ij->j", S, S)
    if rr == 0.0 or np.any(ss == 0.0):
        raise DegenerateInputError("B is undefined for a zero-norm vector")
    rs = r @ S
    return _clamp(1.0 - rs * rs / (rr * ss))


def compute_B_rows(R, S) -> np.ndarray:
    """Row-wise B for paired batches of vectors, shape (m, n) each."""
    rr = np.einsum("ij,ij->i", R, R)
    ss = np.einsum("ij,ij->i", S, S)
    if np.any(rr == 0.0) or np.any(ss == 0.0):
        raise DegenerateInputError("B is undefined for a zero-norm vector")
    rs = np.einsum("ij,ij->i", R, S)
    return _clamp(1.0 - rs * rs / (rr * ss))


def f_from_B(B, dendf):
    """F statistic for one or many B values; B below the cutoff maps to inf."""
    B = np.asarray(B, dtype=float)
    out = np.full(B.shape, INF_F)
    ok = B >= B_ZERO_CUTOFF
    if ok.any():
        out[ok] = beta_f_bridge(B[ok], dendf)
    return float(out) if out.ndim == 0 else out


def compute_stat(r, s, dendf: int) -> StatResult:
    if dendf < 1:
        raise InvalidInputError(f"dendf must be at least 1, got {dendf}")
    B = compute_B(r, s)
    return StatResult(B=B, F=f_from_B(B, dendf), dendf=int(dendf))
