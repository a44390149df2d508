"""Least-squares residuals with an incrementally grown orthonormal basis.

Nothing here forms a dense n x n projector. The span of the included
columns is carried as an orthonormal basis ``Q`` and every projection is
``z - Q @ (Q.T @ z)``. New columns are orthogonalised with two passes of
classical Gram-Schmidt, which keeps ``Q.T @ Q`` at identity to working
precision even for badly conditioned designs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import CollinearityError, InvalidInputError

INTERCEPT_NAME = "(Intercept)"
DEFAULT_COLLINEARITY_TOL = 1e-8


@dataclass(frozen=True)
class Dataset:
    """Response vector plus the full matrix of candidate covariates.

    When ``intercept_added`` is true, column 0 of ``X_full`` is all ones and
    is never offered as a selection candidate.
    """

    y: np.ndarray
    X_full: np.ndarray
    names: tuple
    intercept_added: bool = False

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        X = np.asarray(self.X_full, dtype=float)
        if y.ndim != 1:
            raise InvalidInputError("y must be one-dimensional")
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2:
            raise InvalidInputError("X_full must be two-dimensional")
        n, p = X.shape
        if n != y.shape[0]:
            raise InvalidInputError(f"y has {y.shape[0]} rows but X_full has {n}")
        if n < 3:
            raise InvalidInputError(f"need at least 3 observations, got {n}")
        if p < 1:
            raise InvalidInputError("X_full needs at least one column")
        if not np.all(np.isfinite(y)):
            raise InvalidInputError("y contains non-finite values")
        bad = ~np.all(np.isfinite(X), axis=0)
        if bad.any():
            raise InvalidInputError(
                f"X_full column {int(np.argmax(bad))} contains non-finite values"
            )
        names = tuple(str(s) for s in self.names)
        if len(names) != p:
            raise InvalidInputError(f"{len(names)} names given for {p} columns")
        if self.intercept_added and not np.all(X[:, 0] == 1.0):
            raise InvalidInputError("intercept_added set but column 0 is not all ones")
        y.setflags(write=False)
        X.setflags(write=False)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "X_full", X)
        object.__setattr__(self, "names", names)

    @classmethod
    def from_arrays(cls, y, X, names: Optional[Sequence[str]] = None,
                    intercept: bool = False) -> "Dataset":
        """Build a dataset, optionally prepending an all-ones column."""
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if names is None:
            names = [f"x{j + 1}" for j in range(X.shape[1])]
        names = list(names)
        if intercept:
            X = np.column_stack([np.ones(X.shape[0]), X])
            names = [INTERCEPT_NAME] + names
        return cls(y=y, X_full=X, names=tuple(names), intercept_added=intercept)

    @property
    def n(self) -> int:
        return self.X_full.shape[0]

    @property
    def p(self) -> int:
        return self.X_full.shape[1]

    def candidate_columns(self) -> range:
        return range(1 if self.intercept_added else 0, self.p)


@dataclass(frozen=True)
class RegressionState:
    """Included columns, an orthonormal basis of their span, and the residual.

    ``k`` counts every included column, the intercept among them.
    """

    data: Dataset
    included: tuple
    Q: np.ndarray
    r: np.ndarray = field(repr=False)

    @property
    def k(self) -> int:
        return len(self.included)

    @property
    def n(self) -> int:
        return self.data.n

    @property
    def dendf(self) -> int:
        return self.n - self.k - 1

    @property
    def rss(self) -> float:
        return float(self.r @ self.r)


def _frozen(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


def init_state(d: Dataset, with_intercept: bool = True) -> RegressionState:
    """Starting state: nothing included, or the intercept only.

    With the intercept the residual is ``y`` centred at its mean.
    """
    n = d.n
    if not with_intercept:
        return RegressionState(d, (), _frozen(np.empty((n, 0))), _frozen(d.y.copy()))
    if not d.intercept_added:
        raise InvalidInputError(
            "dataset has no intercept column; build it with intercept=True"
        )
    Q = np.full((n, 1), 1.0 / np.sqrt(n))
    r = d.y - d.y.mean()
    return RegressionState(d, (0,), _frozen(Q), _frozen(r))


def residualize(state: RegressionState, z) -> np.ndarray:
    """Residual of ``z`` (a vector, or the columns of a matrix) after projecting
    out the included span: ``z - Q (Q^T z)``."""
    z = np.asarray(z, dtype=float)
    if z.shape[0] != state.n or z.ndim > 2:
        raise InvalidInputError(
            f"expected length {state.n} along axis 0, got shape {z.shape}"
        )
    if not np.all(np.isfinite(z)):
        raise InvalidInputError("vector to residualize has non-finite entries")
    if state.k == 0:
        return z.copy()
    return z - state.Q @ (state.Q.T @ z)


def orthogonal_direction(state: RegressionState, x: np.ndarray,
                         tol: float = DEFAULT_COLLINEARITY_TOL,
                         index=None) -> np.ndarray:
    """Unit vector in the direction of ``x`` orthogonal to the included span.

    Raises CollinearityError when the residual norm is at most
    ``tol * ||x||``.
    """
    xnorm = float(np.linalg.norm(x))
    s = residualize(state, x)
    if state.k:
        s = s - state.Q @ (state.Q.T @ s)  # second pass
    snorm = float(np.linalg.norm(s))
    if snorm <= tol * xnorm or snorm == 0.0:
        raise CollinearityError(index, snorm / xnorm if xnorm else 0.0)
    return s / snorm


def add_covariate(state: RegressionState, j: int,
                  tol: float = DEFAULT_COLLINEARITY_TOL) -> RegressionState:
    """Return a new state with column ``j`` of the dataset included."""
    d = state.data
    if not 0 <= j < d.p:
        raise InvalidInputError(f"column index {j} out of range 0..{d.p - 1}")
    if j in state.included:
        raise InvalidInputError(f"column {j} is already included")
    u = orthogonal_direction(state, d.X_full[:, j], tol=tol, index=j)
    r = state.r - (u @ state.r) * u
    Q = np.column_stack([state.Q, u])
    return RegressionState(d, state.included + (j,), _frozen(Q), _frozen(r))


def state_from_columns(d: Dataset, columns: Sequence[int],
                       tol: float = DEFAULT_COLLINEARITY_TOL) -> RegressionState:
    """Replay a list of column inclusions from the empty state."""
    state = init_state(d, with_intercept=False)
    for j in columns:
        state = add_covariate(state, j, tol=tol)
    return state
