"""Greedy forward selection stopped by best-of-q Gaussian-covariate p-values.

At each step every remaining column is residualised against the included
span and scored by its F statistic against the current residual. The
column with the largest F is included when the probability that the best
of q pure-noise Gaussian covariates would do at least as well is below
``alpha``; otherwise selection stops.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from .errors import DegreesOfFreedomError, InvalidInputError
from .linmodel import (
    DEFAULT_COLLINEARITY_TOL,
    Dataset,
    RegressionState,
    add_covariate,
    init_state,
)
from .pvalue import p_best_of_q, p_single
from .statistic import compute_B_many, f_from_B

PERFECT_FIT_RTOL = 1e-12
STOP_REASONS = ("threshold", "max_steps", "exhausted", "perfect_fit")


@dataclass(frozen=True)
class SelectionConfig:
    alpha: float = 0.01
    max_steps: Optional[int] = None  # None: up to the number of candidates
    with_intercept: bool = True
    collinearity_tol: float = DEFAULT_COLLINEARITY_TOL
    count_rejected_in_q: bool = False

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise InvalidInputError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.max_steps is not None and self.max_steps < 1:
            raise InvalidInputError(f"max_steps must be at least 1, got {self.max_steps}")
        if not self.collinearity_tol > 0.0:
            raise InvalidInputError("collinearity_tol must be positive")


@dataclass(frozen=True)
class CandidateScore:
    index: int
    name: str
    B: float
    F: float
    p_single: float


@dataclass(frozen=True)
class StepRecord:
    step: int
    chosen: int
    chosen_name: str
    q: int
    dendf: int
    f_max: float
    p_single: float
    p_adjusted: float
    accepted: bool
    scores: List[CandidateScore] = field(default_factory=list)


@dataclass
class SelectionTrace:
    steps: List[StepRecord]
    final_included: List[int]
    final_names: List[str]
    stop_reason: str
    alpha: float
    residual_ss: float

    def to_dict(self) -> dict:
        return asdict(self)


def score_candidates(state: RegressionState, d: Dataset,
                     cfg: SelectionConfig) -> List[CandidateScore]:
    """Score every non-included candidate that is not collinear with the
    included span, in increasing column order."""
    included = set(state.included)
    cols = [j for j in d.candidate_columns() if j not in included]
    if not cols:
        return []
    dendf = state.dendf
    if dendf < 1:
        raise DegreesOfFreedomError(
            f"n - k - 1 = {dendf} with n={state.n}, k={state.k}; no degrees of freedom left"
        )
    X = d.X_full[:, cols]
    S = X
    if state.k:
        S = S - state.Q @ (state.Q.T @ S)
        S = S - state.Q @ (state.Q.T @ S)
    xnorm = np.linalg.norm(X, axis=0)
    snorm = np.linalg.norm(S, axis=0)
    keep = (snorm > cfg.collinearity_tol * xnorm) & (snorm > 0.0)
    if not keep.any():
        return []
    idx = [c for c, k in zip(cols, keep) if k]
    B = compute_B_many(state.r, S[:, keep])
    F = f_from_B(B, dendf)
    P = p_single(F, dendf)
    return [
        CandidateScore(index=j, name=d.names[j], B=float(b), F=float(f), p_single=float(p))
        for j, b, f, p in zip(idx, B, F, P)
    ]


def _perfect_fit(state: RegressionState, ynorm: float) -> bool:
    return float(np.linalg.norm(state.r)) <= PERFECT_FIT_RTOL * ynorm


def forward_select(d: Dataset, cfg: SelectionConfig = SelectionConfig(),
                   keep_scores: bool = True) -> SelectionTrace:
    state = init_state(d, cfg.with_intercept)
    ynorm = float(np.linalg.norm(d.y))
    max_steps = cfg.max_steps if cfg.max_steps is not None else d.p
    steps: List[StepRecord] = []
    n_accepted = 0

    while True:
        if _perfect_fit(state, ynorm):
            reason = "perfect_fit"
            break
        if n_accepted >= max_steps:
            reason = "max_steps"
            break
        included = set(state.included)
        remaining = [j for j in d.candidate_columns() if j not in included]
        # Out of residual degrees of freedom is treated like running out of columns.
        if not remaining or state.dendf < 1:
            reason = "exhausted"
            break
        scores = score_candidates(state, d, cfg)
        if not scores:
            reason = "exhausted"
            break
        q = len(remaining) if cfg.count_rejected_in_q else len(scores)
        Fs = np.array([s.F for s in scores])
        best = scores[int(np.argmax(Fs))]  # first maximum: lowest column index
        pv = p_best_of_q(best.F, state.dendf, q)
        accepted = pv.p_adjusted < cfg.alpha
        steps.append(StepRecord(
            step=len(steps) + 1,
            chosen=best.index,
            chosen_name=best.name,
            q=q,
            dendf=state.dendf,
            f_max=best.F,
            p_single=pv.p_single,
            p_adjusted=pv.p_adjusted,
            accepted=bool(accepted),
            scores=scores if keep_scores else [],
        ))
        if not accepted:
            reason = "threshold"
            break
        state = add_covariate(state, best.index, tol=cfg.collinearity_tol)
        n_accepted += 1

    selected = [j for j in state.included if not (d.intercept_added and j == 0)]
    return SelectionTrace(
        steps=steps,
        final_included=list(state.included),
        final_names=[d.names[j] for j in selected],
        stop_reason=reason,
        alpha=cfg.alpha,
        residual_ss=state.rss,
    )


__all__ = [
    "CandidateScore",
    "SelectionConfig",
    "SelectionTrace",
    "StepRecord",
    "STOP_REASONS",
    "forward_select",
    "score_candidates",
]
