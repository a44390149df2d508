"""Monte Carlo checks of the Beta law of B and of best-of-q p-value calibration.

Two sampling schemes target the same law Beta((n-k-1)/2, 1/2):

* gaussian_covariate: X and y are fixed once, the candidate Z is redrawn
  every replication, B = B(r, (I-P)Z).
* standard_model: X and a candidate z are fixed once, the response
  Y = X beta + sigma E is redrawn, B = B((I-P)Y, s).

Randomness comes from Philox streams keyed by ``(seed, purpose, chunk)``.
Replications are generated in fixed-size chunks, each from its own stream,
so the output does not depend on how many worker threads evaluate them.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DegreesOfFreedomError, InvalidInputError
from .linmodel import Dataset, state_from_columns, residualize
from .pvalue import adjust_best_of_q, p_single
from .specfun import BetaParams, beta_cdf
from .statistic import compute_B_many, f_from_B

CHUNK = 500
KS_C_001 = 1.95  # asymptotic Kolmogorov critical value, level 0.001
MIN_REPS = 1000
Y_DISTS = ("normal", "t3")

_DESIGN, _COVARIATE, _STANDARD, _MAXP = 0, 1, 2, 3


@dataclass(frozen=True)
class McConfig:
    n: int = 20
    k: int = 3
    reps: int = 100_000
    seed: int = 1
    sigma_z: float = 1.0
    sigma: float = 1.0
    q: int = 1
    alpha: float = 0.05
    y_dist: str = "normal"
    beta: Optional[tuple] = None  # regression coefficients; None draws them

    def __post_init__(self):
        if self.n - self.k - 1 < 1:
            raise DegreesOfFreedomError(
                f"n - k - 1 must be at least 1 (n={self.n}, k={self.k})"
            )
        if self.k < 0:
            raise InvalidInputError("k must be nonnegative")
        if self.reps < MIN_REPS:
            raise InvalidInputError(f"reps must be at least {MIN_REPS}, got {self.reps}")
        if not (self.sigma_z > 0 and self.sigma > 0):
            raise InvalidInputError("sigma and sigma_z must be positive")
        if self.q < 1:
            raise InvalidInputError(f"q must be at least 1, got {self.q}")
        if not 0.0 < self.alpha < 1.0:
            raise InvalidInputError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.y_dist not in Y_DISTS:
            raise InvalidInputError(f"y_dist must be one of {Y_DISTS}, got {self.y_dist!r}")
        if self.beta is not None and len(self.beta) != self.k:
            raise InvalidInputError(f"beta needs {self.k} entries, got {len(self.beta)}")
        if not 0 <= self.seed < 2**64:
            raise InvalidInputError("seed must be a 64-bit unsigned integer")

    @property
    def dendf(self) -> int:
        return self.n - self.k - 1

    @property
    def beta_params(self) -> BetaParams:
        return BetaParams(self.dendf / 2.0, 0.5)


@dataclass(frozen=True)
class McReport:
    scheme: str
    ks_stat: float
    ks_band: float
    beta_params: BetaParams
    empirical_mean: float
    theoretical_mean: float
    empirical_var: float
    theoretical_var: float
    reps: int
    q: Optional[int] = None
    alpha: Optional[float] = None
    rejection_rate: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)


def _rng(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))


def resolve_workers(workers: Optional[int] = None) -> int:
    if workers is None:
        env = os.environ.get("GCOV_THREADS")
        if env:
            try:
                workers = int(env)
            except ValueError:
                raise InvalidInputError(f"GCOV_THREADS must be an integer, got {env!r}")
        else:
            workers = os.cpu_count() or 1
    return max(1, workers)


def _run_chunks(reps: int, fn: Callable[[int, int], np.ndarray],
                workers: Optional[int]) -> np.ndarray:
    sizes = [min(CHUNK, reps - start) for start in range(0, reps, CHUNK)]
    w = resolve_workers(workers)
    if w == 1 or len(sizes) == 1:
        parts = [fn(i, m) for i, m in enumerate(sizes)]
    else:
        with ThreadPoolExecutor(max_workers=w) as pool:
            parts = list(pool.map(fn, range(len(sizes)), sizes))
    return np.concatenate(parts)


@dataclass(frozen=True)
class _Design:
    X: np.ndarray
    y: np.ndarray
    z: np.ndarray
    beta: np.ndarray


def make_design(cfg: McConfig) -> _Design:
    """Fixed quantities shared by all replications, drawn from the design stream."""
    rng = _rng(cfg.seed, _DESIGN)
    X = rng.standard_normal((cfg.n, cfg.k))
    if cfg.y_dist == "t3":
        y = rng.standard_t(3, cfg.n)
    else:
        y = rng.standard_normal(cfg.n)
    z = rng.standard_normal(cfg.n)
    beta = rng.standard_normal(cfg.k)
    if cfg.beta is not None:
        beta = np.asarray(cfg.beta, dtype=float)
    return _Design(X=X, y=y, z=z, beta=beta)


def _fitted_state(design: _Design, y):
    # Dataset needs one column even when k == 0; the dummy is never included.
    names = [f"x{j + 1}" for j in range(design.X.shape[1])] or ["_"]
    X = design.X if design.X.shape[1] else np.ones((len(y), 1))
    d = Dataset(y=y, X_full=X, names=tuple(names))
    return state_from_columns(d, range(design.X.shape[1]))


def _project_rows(Q: np.ndarray, M: np.ndarray) -> np.ndarray:
    """Remove the span of Q from each row (last axis) of M."""
    if Q.shape[1] == 0:
        return M
    return M - (M @ Q) @ Q.T


def sample_B_gaussian_covariate(cfg: McConfig, workers: Optional[int] = None) -> np.ndarray:
    """B(r, S) for a fixed residual r and fresh Gaussian candidates S = (I-P)Z."""
    design = make_design(cfg)
    state = _fitted_state(design, design.y)
    Q, r = state.Q, state.r

    def chunk(i, m):
        Z = _rng(cfg.seed, _COVARIATE, i).standard_normal((m, cfg.n)) * cfg.sigma_z
        S = _project_rows(Q, Z)
        return compute_B_many(r, S.T)

    return _run_chunks(cfg.reps, chunk, workers)


def sample_B_standard_model(cfg: McConfig, workers: Optional[int] = None) -> np.ndarray:
    """B(R, s) for a fixed residualised candidate s and fresh responses
    Y = X beta + sigma E, R = (I-P)Y."""
    design = make_design(cfg)
    state = _fitted_state(design, design.y)
    Q = state.Q
    s = residualize(state, design.z)
    mean = design.X @ design.beta

    def chunk(i, m):
        E = _rng(cfg.seed, _STANDARD, i).standard_normal((m, cfg.n))
        R = _project_rows(Q, mean + cfg.sigma * E)
        return compute_B_many(s, R.T)

    return _run_chunks(cfg.reps, chunk, workers)


def sample_max_pvalues(cfg: McConfig, workers: Optional[int] = None) -> np.ndarray:
    """Best-of-q adjusted p-values of the largest F among q fresh Gaussian
    candidates against a fixed residual."""
    design = make_design(cfg)
    state = _fitted_state(design, design.y)
    Q, r = state.Q, state.r
    rr = float(r @ r)
    dendf = cfg.dendf

    def chunk(i, m):
        Z = _rng(cfg.seed, _MAXP, i).standard_normal((m, cfg.q, cfg.n)) * cfg.sigma_z
        S = _project_rows(Q, Z)
        rs = S @ r
        ss = np.einsum("ijk,ijk->ij", S, S)
        # the largest F is the smallest B
        b_min = np.clip(1.0 - (rs * rs / (rr * ss)), 0.0, 1.0).min(axis=1)
        return adjust_best_of_q(p_single(f_from_B(b_min, dendf), dendf), cfg.q)

    return _run_chunks(cfg.reps, chunk, workers)


def ks_distance(samples, cdf: Callable) -> float:
    """Exact sup-distance between the empirical CDF of ``samples`` and ``cdf``."""
    x = np.sort(np.asarray(samples, dtype=float))
    m = x.size
    if m == 0:
        raise InvalidInputError("ks_distance needs at least one sample")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("ks_distance samples must be finite")
    F = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, m + 1)
    d_plus = np.max(i / m - F)
    d_minus = np.max(F - (i - 1) / m)
    return float(max(d_plus, d_minus, 0.0))


def ks_two_sample(a, b) -> float:
    """Sup-distance between two empirical CDFs."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise InvalidInputError("ks_two_sample needs nonempty samples")
    pooled = np.concatenate([a, b])
    fa = np.searchsorted(a, pooled, side="right") / a.size
    fb = np.searchsorted(b, pooled, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_band(m: int) -> float:
    return KS_C_001 / math.sqrt(m)


def ks_band_two_sample(m1: int, m2: int) -> float:
    return KS_C_001 * math.sqrt((m1 + m2) / (m1 * m2))


def _beta_report(scheme: str, samples: np.ndarray, params: BetaParams, **extra) -> McReport:
    return McReport(
        scheme=scheme,
        ks_stat=ks_distance(samples, lambda x: beta_cdf(params, x)),
        ks_band=ks_band(samples.size),
        beta_params=params,
        empirical_mean=float(samples.mean()),
        theoretical_mean=params.mean,
        empirical_var=float(samples.var()),
        theoretical_var=params.var,
        reps=int(samples.size),
        **extra,
    )


def simulate_B_gaussian_covariate(cfg: McConfig, workers: Optional[int] = None) -> McReport:
    return _beta_report("gaussian_covariate", sample_B_gaussian_covariate(cfg, workers),
                        cfg.beta_params)


def simulate_B_standard_model(cfg: McConfig, workers: Optional[int] = None) -> McReport:
    return _beta_report("standard_model", sample_B_standard_model(cfg, workers),
                        cfg.beta_params)


def simulate_max_pvalue_uniformity(cfg: McConfig, workers: Optional[int] = None) -> McReport:
    """KS of best-of-q adjusted p-values against Uniform(0, 1) = Beta(1, 1)."""
    p = sample_max_pvalues(cfg, workers)
    return _beta_report(
        "gaussian_covariate", p, BetaParams(1.0, 1.0),
        q=cfg.q, alpha=cfg.alpha, rejection_rate=float(np.mean(p < cfg.alpha)),
    )


def compare_schemes(cfg: McConfig, workers: Optional[int] = None) -> dict:
    """Run both schemes and the two-sample KS distance between their B samples."""
    gc = sample_B_gaussian_covariate(cfg, workers)
    sm = sample_B_standard_model(cfg, workers)
    params = cfg.beta_params
    return {
        "reports": [
            _beta_report("gaussian_covariate", gc, params),
            _beta_report("standard_model", sm, params),
        ],
        "two_sample_ks": ks_two_sample(gc, sm),
        "two_sample_band": ks_band_two_sample(gc.size, sm.size),
    }


__all__ = [
    "McConfig",
    "McReport",
    "compare_schemes",
    "ks_band",
    "ks_band_two_sample",
    "ks_distance",
    "ks_two_sample",
    "make_design",
    "sample_B_gaussian_covariate",
    "sample_B_standard_model",
    "sample_max_pvalues",
    "simulate_B_gaussian_covariate",
    "simulate_B_standard_model",
    "simulate_max_pvalue_uniformity",
]
