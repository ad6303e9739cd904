"""Autoregressive regularization: lag selectors, penalty, closed-form solves.

Each sensor series ``z`` of length ``T`` is scored by the squared
residual of an AR model over the lag set ``H = (h_1 < ... < h_d)``:
``sum_t (z[t] - sum_i a_i * z[t - h_i])**2`` for ``t`` ranging over the
last ``T - h_d`` steps.  Writing the residual as ``B @ z`` with a banded
matrix ``B`` turns the regularized subproblem

    minimize  ||B @ z||^2 + alpha * ||z - x||^2

into the SPD linear system ``(B.T @ B + alpha * I) z = alpha * x``.
``B.T @ B`` has bandwidth ``h_d``, so the system is assembled directly
in banded storage and solved with a banded Cholesky factorization; the
selector matrices themselves are only materialized densely for
small-scale verification.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla


@dataclass(frozen=True)
class LagStructure:
    """Validated lag set together with the series length it applies to."""

    lags: tuple[int, ...]
    length: int

    @property
    def order(self) -> int:
        """Number of lags ``d``."""
        return len(self.lags)

    @property
    def max_lag(self) -> int:
        return self.lags[-1]

    @property
    def n_residuals(self) -> int:
        """Number of time steps the AR residual is defined on."""
        return self.length - self.max_lag

    def selector_offset(self, i: int) -> int:
        """Column where the identity block of ``selector(i)`` starts.

        ``i = 0`` is the current-value selector (picks ``z[max_lag:]``);
        ``i = 1..order`` picks the values lagged by ``lags[i-1]``.
        """
        if not 0 <= i <= self.order:
            raise ValueError(f"selector index must be in [0, {self.order}], got {i}")
        if i == 0:
            return self.max_lag
        return self.max_lag - self.lags[i - 1]

    def selector(self, i: int) -> np.ndarray:
        """Dense ``(n_residuals, length)`` selector matrix (testing aid)."""
        n = self.n_residuals
        out = np.zeros((n, self.length))
        out[np.arange(n), np.arange(n) + self.selector_offset(i)] = 1.0
        return out

    def lag_stack(self) -> np.ndarray:
        """Horizontal stack ``[selector(1) | ... | selector(order)]``."""
        return np.hstack([self.selector(i) for i in range(1, self.order + 1)])


def build_lag_structure(lags, length: int) -> LagStructure:
    """Validate a lag set against a series length.

    Lags must be strictly increasing positive integers with the largest
    one smaller than ``length``.
    """
    lags = tuple(int(h) for h in lags)
    if len(lags) == 0:
        raise ValueError("lag set must not be empty")
    if lags[0] <= 0:
        raise ValueError(f"lags must be positive, got {lags}")
    if any(b <= a for a, b in zip(lags, lags[1:])):
        raise ValueError(f"lags must be strictly increasing, got {lags}")
    length = int(length)
    if lags[-1] >= length:
        raise ValueError(
            f"largest lag {lags[-1]} must be smaller than series length {length}"
        )
    return LagStructure(lags=lags, length=length)


def _check_series_matrix(Z: np.ndarray, A: np.ndarray, lag: LagStructure):
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if Z.shape[1] != lag.length:
        raise ValueError(f"series length {Z.shape[1]} != lag structure length {lag.length}")
    if A.shape != (Z.shape[0], lag.order):
        raise ValueError(
            f"coefficients shape {A.shape} does not match ({Z.shape[0]}, {lag.order})"
        )
    return Z, A


def ar_residual(Z: np.ndarray, A: np.ndarray, lag: LagStructure) -> np.ndarray:
    """Residuals ``z[t] - sum_i a_i z[t-h_i]`` for the last ``T - h_d`` steps.

    Row ``m`` holds the residuals of series ``m``; column ``u``
    corresponds to time step ``u + max_lag``.
    """
    Z, A = _check_series_matrix(Z, A, lag)
    T, h = lag.length, lag.max_lag
    resid = Z[:, h:].copy()
    for i, hi in enumerate(lag.lags):
        resid -= A[:, i : i + 1] * Z[:, h - hi : T - hi]
    return resid


def temporal_variation(Z: np.ndarray, A: np.ndarray, lag: LagStructure) -> float:
    """Sum of squared AR residuals over all series."""
    return float(np.sum(ar_residual(Z, A, lag) ** 2))


def _gram_band(a: np.ndarray, lag: LagStructure) -> np.ndarray:
    """Lower-banded storage of ``B.T @ B`` for one series.

    ``B`` has rows ``t = 0..n_residuals-1`` with entry ``+1`` at column
    ``t + max_lag`` and ``-a_i`` at ``t + max_lag - h_i``; the Gram
    matrix only has diagonals with offset at most ``max_lag``.
    """
    T, h, n = lag.length, lag.max_lag, lag.n_residuals
    offsets = [h] + [h - hi for hi in lag.lags]
    coeffs = [1.0] + [-float(ai) for ai in a]
    band = np.zeros((h + 1, T))
    for ck, ok in zip(coeffs, offsets):
        for cl, ol in zip(coeffs, offsets):
            if ok < ol:
                continue
            band[ok - ol, ol : ol + n] += ck * cl
    return band


def solve_z_series(
    x: np.ndarray, a: np.ndarray, lag: LagStructure, alpha: float
) -> np.ndarray:
    """Solve ``(B.T @ B + alpha * I) z = alpha * x`` for one series.

    ``alpha`` must be positive, which makes the banded system symmetric
    positive definite; factorization failures surface as
    ``scipy.linalg.LinAlgError``.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != lag.length:
        raise ValueError(f"series shape {x.shape} != ({lag.length},)")
    a = np.asarray(a, dtype=float)
    if a.shape != (lag.order,):
        raise ValueError(f"coefficient shape {a.shape} != ({lag.order},)")
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    band = _gram_band(a, lag)
    band[0] += alpha
    return sla.solveh_banded(band, alpha * x, lower=True)


def solve_z_matrix(
    X: np.ndarray, A: np.ndarray, lag: LagStructure, alpha: float
) -> np.ndarray:
    """Row-wise :func:`solve_z_series` for a stack of series."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {X.shape}")
    X, A = _check_series_matrix(X, A, lag)
    Z = np.empty_like(X)
    for m in range(X.shape[0]):
        Z[m] = solve_z_series(X[m], A[m], lag, alpha)
    return Z


def solve_z_vectorized(
    X: np.ndarray,
    A: np.ndarray,
    lag: LagStructure,
    alpha: float,
    max_size: int = 2000,
) -> np.ndarray:
    """Joint dense solve over all series at once (verification oracle).

    Builds the full ``(M*T, M*T)`` system from Kronecker and
    column-wise Kronecker products of the dense selectors and solves it
    directly.  Only intended for cross-checking :func:`solve_z_matrix`
    on small problems; refuses instances with ``M * T > max_size``.
    """
    X, A = _check_series_matrix(np.asarray(X, dtype=float), A, lag)
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    M, T = X.shape
    if M * T > max_size:
        raise ValueError(f"joint system size {M * T} exceeds limit {max_size}")
    eye_m = np.eye(M)
    B = np.kron(eye_m, lag.selector(0))
    C = np.kron(eye_m, lag.lag_stack()) @ np.kron(
        sla.khatri_rao(eye_m, A.T), np.eye(T)
    )
    D = B - C
    rhs = alpha * X.reshape(-1)  # row-stacked series
    z = np.linalg.solve(D.T @ D + alpha * np.eye(M * T), rhs)
    return z.reshape(M, T)


def update_coefficients(
    Z: np.ndarray, lag: LagStructure, rcond: float = 1e-10
) -> np.ndarray:
    """Least-squares AR coefficients for every series.

    Each row solves ``min_a || V_m a - z_m[max_lag:] ||`` where column
    ``i`` of ``V_m`` holds the series lagged by ``lags[i]``.  The
    minimum-norm solution is taken, with singular values below
    ``rcond`` times the largest treated as zero, so rank-deficient
    regressors (constant or all-zero series) are well-defined.
    """
    Z = np.asarray(Z, dtype=float)
    if Z.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {Z.shape}")
    if Z.shape[1] != lag.length:
        raise ValueError(f"series length {Z.shape[1]} != lag structure length {lag.length}")
    T, h = lag.length, lag.max_lag
    A = np.zeros((Z.shape[0], lag.order))
    for m in range(Z.shape[0]):
        V = np.column_stack([Z[m, h - hi : T - hi] for hi in lag.lags])
        A[m] = np.linalg.lstsq(V, Z[m, h:], rcond=rcond)[0]
    return A
