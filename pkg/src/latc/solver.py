"""ADMM solver combining truncated-nuclear-norm and AR regularization.

The completion problem couples a low-rank tensor variable with a time
series matrix:

    minimize  ||X||_{r,*} + (lam / 2) * ||Z||_AR
    subject to  X = tensorize(Z),  Z agrees with Y on observed entries

and is solved by alternating ADMM steps on (X, Z, dual) with the AR
coefficients refit by least squares after every block of inner
iterations.  ``lam`` is tied to the ADMM penalty as ``lam = c * rho``,
so the ratio ``rho / lam = 1 / c`` entering the Z step stays constant
while ``rho`` grows geometrically.

Setting ``c = 0`` removes the AR term entirely; the solver then runs
plain truncated-nuclear-norm completion (see :func:`lrtc_tnn_mode`).
:func:`impute_lamc` is the matrix variant that thresholds the ``(M, T)``
matrix itself instead of the three tensor unfoldings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .autoreg import (
    LagStructure,
    build_lag_structure,
    solve_z_matrix,
    temporal_variation,
    update_coefficients,
)
from .lowrank import svt, tensor_tnn, truncated_nuclear_norm
from .tensors import detensorize, fold, frobenius_norm, project, tensorize, unfold

DEFAULT_LAGS = (1, 2, 3, 4, 5, 6)
RHO_GROWTH = 1.05
RHO_MAX_FACTOR = 1e5
COEFF_INIT_SCALE = 0.01


@dataclass
class SolverConfig:
    """Parameters of one completion run.

    ``dims = (M, I, J)`` fixes the tensor layout: ``M`` sensors, ``I``
    steps per day, ``J`` days, with the data matrix of shape
    ``(M, I * J)``.  ``c`` couples the AR weight to the ADMM penalty
    (``lam = c * rho``); ``c = 0`` disables the AR half.  ``rho_max``
    defaults to ``1e5 * rho0``.
    """

    dims: tuple[int, int, int]
    rho0: float = 1e-4
    rho_max: float | None = None
    c: float = 1.0
    r: int = 10
    lags: tuple[int, ...] = DEFAULT_LAGS
    weights: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)
    inner_iters: int = 3
    max_outer_iters: int = 100
    tol: float = 1e-4
    seed: int = 0

    def resolved_rho_max(self) -> float:
        return RHO_MAX_FACTOR * self.rho0 if self.rho_max is None else self.rho_max

    def validate(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 3 or any(d <= 0 for d in dims):
            raise ValueError(f"dims must be three positive integers, got {self.dims}")
        if not self.rho0 > 0:
            raise ValueError(f"rho0 must be positive, got {self.rho0}")
        if self.rho_max is not None and self.rho_max < self.rho0:
            raise ValueError(f"rho_max {self.rho_max} smaller than rho0 {self.rho0}")
        if self.c < 0:
            raise ValueError(f"c must be non-negative, got {self.c}")
        if not isinstance(self.r, (int, np.integer)) or self.r < 0:
            raise ValueError(f"r must be a non-negative integer, got {self.r!r}")
        lags = tuple(int(h) for h in self.lags)
        if not lags or lags[0] <= 0 or any(b <= a for a, b in zip(lags, lags[1:])):
            raise ValueError(f"lags must be strictly increasing positive, got {self.lags}")
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (3,) or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
            raise ValueError(f"weights must be 3 non-negative values summing to 1, got {self.weights}")
        if self.inner_iters < 1:
            raise ValueError(f"inner_iters must be >= 1, got {self.inner_iters}")
        if self.max_outer_iters < 1:
            raise ValueError(f"max_outer_iters must be >= 1, got {self.max_outer_iters}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")


@dataclass(frozen=True)
class SolverState:
    """Snapshot handed to the optional per-inner-step callback."""

    x: np.ndarray
    z: np.ndarray
    coefficients: np.ndarray
    dual: np.ndarray
    outer_iter: int
    inner_iter: int
    rho: float


@dataclass(frozen=True)
class IterationRecord:
    """One outer iteration of the history."""

    outer: int
    change: float
    primal_residual: float
    rho: float
    low_rank_term: float
    ar_term: float


@dataclass
class ImputationResult:
    recovered: np.ndarray
    coefficients: np.ndarray
    iterations: int
    converged: bool
    history: list[IterationRecord] = field(default_factory=list)


Callback = Callable[[SolverState], None]


def update_x(
    Z: np.ndarray, dual: np.ndarray, cfg: SolverConfig, rho: float
) -> np.ndarray:
    """Weighted thresholding step over the three unfoldings.

    Each mode ``p`` applies :func:`svt` with threshold ``weights[p]/rho``
    to the unfolding of ``tensorize(Z) - dual / rho`` and the folded
    results are combined with the same weights.  Modes with zero weight
    are skipped.
    """
    m, i, j = cfg.dims
    w = tensorize(Z, i, j) - dual / rho
    out = np.zeros_like(w)
    for mode, weight in zip((1, 2, 3), cfg.weights):
        if weight == 0.0:
            continue
        out += weight * fold(svt(unfold(w, mode), cfg.r, weight / rho), mode, (m, i, j))
    return out


def update_z(
    X: np.ndarray,
    dual: np.ndarray,
    coefficients: np.ndarray,
    lag: LagStructure,
    rho: float,
    lam: float,
    observed: np.ndarray,
    mask: np.ndarray,
) -> np.ndarray:
    """AR-regularized Z step followed by the observation overwrite.

    Solves the per-series banded system against the target
    ``detensorize(X + dual / rho)`` with ``alpha = rho / lam`` and then
    copies the observed entries of ``observed`` back in place.
    """
    if lam <= 0:
        raise ValueError(f"lam must be positive, got {lam}")
    target = detensorize(X + dual / rho)
    raw = solve_z_matrix(target, coefficients, lag, rho / lam)
    return np.where(np.asarray(mask, dtype=bool), observed, raw)


def update_dual(
    dual: np.ndarray, X: np.ndarray, Z: np.ndarray, rho: float
) -> np.ndarray:
    """Gradient ascent step ``dual + rho * (X - tensorize(Z))``."""
    x = np.asarray(X, dtype=float)
    if x.ndim != 3:
        raise ValueError(f"expected a third-order tensor, got shape {x.shape}")
    return np.asarray(dual, dtype=float) + rho * (x - tensorize(Z, x.shape[1], x.shape[2]))


def _check_inputs(Y: np.ndarray, mask: np.ndarray, cfg: SolverConfig):
    cfg.validate()
    m, i, j = cfg.dims
    Y = np.asarray(Y, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    if Y.shape != (m, i * j):
        raise ValueError(f"data shape {Y.shape} does not match dims {cfg.dims}")
    if mask.shape != Y.shape:
        raise ValueError(f"mask shape {mask.shape} != data shape {Y.shape}")
    if not mask.any():
        raise ValueError("mask has no observed entries")
    if not np.all(np.isfinite(Y)):
        raise ValueError("data contains non-finite entries; encode missing cells via the mask")
    return Y, mask


def _admm(
    Y: np.ndarray,
    mask: np.ndarray,
    cfg: SolverConfig,
    tensor_form: bool,
    use_ar: bool,
    callback: Callback | None,
) -> ImputationResult:
    """Shared inner/outer loop for the tensor and matrix variants.

    With ``use_ar`` false the Z step degenerates to the thresholded
    target itself (the ``lam -> 0`` limit), the coefficient refit is
    skipped and neither ``cfg.lags`` nor ``cfg.seed`` influences the
    result.
    """
    m_dim, i_dim, j_dim = cfg.dims
    t_dim = i_dim * j_dim
    rho_max = cfg.resolved_rho_max()

    if use_ar:
        lag = build_lag_structure(cfg.lags, t_dim)
        rng = np.random.default_rng(cfg.seed)
        coeffs = rng.random((m_dim, lag.order)) * COEFF_INIT_SCALE
    else:
        lag = None
        coeffs = np.zeros((m_dim, len(cfg.lags)))

    y_obs = project(Y, mask)
    obs_norm = frobenius_norm(y_obs)
    Z = y_obs.copy()
    if tensor_form:
        dual = np.zeros((m_dim, i_dim, j_dim))
    else:
        dual = np.zeros((m_dim, t_dim))

    rho = cfg.rho0
    prev_estimate = y_obs
    history: list[IterationRecord] = []
    converged = False
    outer = 0
    estimate = y_obs

    for outer in range(1, cfg.max_outer_iters + 1):
        residuals = np.empty(cfg.inner_iters)
        for inner in range(cfg.inner_iters):
            rho = min(RHO_GROWTH * rho, rho_max)
            lam = cfg.c * rho
            if tensor_form:
                x_iter = update_x(Z, dual, cfg, rho)
                target = detensorize(x_iter + dual / rho)
            else:
                x_iter = svt(Z - dual / rho, cfg.r, 1.0 / rho)
                target = x_iter + dual / rho
            if use_ar:
                z_raw = solve_z_matrix(target, coeffs, lag, rho / lam)
            else:
                z_raw = target
            gap = x_iter - (tensorize(z_raw, i_dim, j_dim) if tensor_form else z_raw)
            dual = dual + rho * gap
            residuals[inner] = frobenius_norm(gap)
            Z = np.where(mask, Y, z_raw)
            if callback is not None:
                callback(SolverState(x_iter, Z, coeffs, dual, outer, inner, rho))

        if use_ar:
            coeffs = update_coefficients(Z, lag)

        estimate = detensorize(x_iter) if tensor_form else x_iter
        change = frobenius_norm(estimate - prev_estimate) / obs_norm
        if tensor_form:
            low_rank = tensor_tnn(x_iter, cfg.r, cfg.weights)
        else:
            low_rank = truncated_nuclear_norm(x_iter, cfg.r)
        ar_term = 0.5 * lam * temporal_variation(Z, coeffs, lag) if use_ar else 0.0
        history.append(
            IterationRecord(
                outer=outer,
                change=change,
                primal_residual=float(residuals.mean()),
                rho=rho,
                low_rank_term=low_rank,
                ar_term=ar_term,
            )
        )
        prev_estimate = estimate
        if change < cfg.tol:
            converged = True
            break

    recovered = np.where(mask, Y, estimate)
    return ImputationResult(
        recovered=recovered,
        coefficients=coeffs,
        iterations=outer,
        converged=converged,
        history=history,
    )


def impute(
    Y: np.ndarray,
    mask: np.ndarray,
    cfg: SolverConfig,
    callback: Callback | None = None,
) -> ImputationResult:
    """Tensor-form completion of the missing entries of ``Y``.

    ``mask`` is true on observed cells.  Observed entries of the result
    equal ``Y`` exactly; unobserved cells come from the converged
    low-rank tensor iterate.  With ``cfg.c == 0`` the run is identical
    to :func:`lrtc_tnn_mode`.
    """
    Y, mask = _check_inputs(Y, mask, cfg)
    m, i, j = cfg.dims
    if cfg.r >= min(m, i, j):
        raise ValueError(f"r={cfg.r} must be smaller than min(dims)={min(m, i, j)}")
    use_ar = cfg.c > 0
    return _admm(Y, mask, cfg, tensor_form=True, use_ar=use_ar, callback=callback)


def impute_lamc(
    Y: np.ndarray,
    mask: np.ndarray,
    cfg: SolverConfig,
    callback: Callback | None = None,
) -> ImputationResult:
    """Matrix-form variant: one thresholding step on the ``(M, T)`` matrix.

    The low-rank half applies :func:`svt` with threshold ``1 / rho`` to
    the matrix iterate itself; the AR half and the schedule are shared
    with :func:`impute`.  With ``M = 1``, ``impute`` on a ``(1, T, 1)``
    layout and weights ``(1, 0, 0)`` performs the same arithmetic.
    """
    Y, mask = _check_inputs(Y, mask, cfg)
    m, i, j = cfg.dims
    if cfg.r >= min(m, i * j):
        raise ValueError(f"r={cfg.r} must be smaller than min(M, T)={min(m, i * j)}")
    use_ar = cfg.c > 0
    return _admm(Y, mask, cfg, tensor_form=False, use_ar=use_ar, callback=callback)


def lrtc_tnn_mode(
    Y: np.ndarray,
    mask: np.ndarray,
    cfg: SolverConfig,
    callback: Callback | None = None,
) -> ImputationResult:
    """Pure truncated-nuclear-norm tensor completion (no AR term).

    Ignores ``cfg.c``; ``cfg.lags`` and ``cfg.seed`` do not affect the
    output because the AR machinery is never touched.
    """
    Y, mask = _check_inputs(Y, mask, cfg)
    m, i, j = cfg.dims
    if cfg.r >= min(m, i, j):
        raise ValueError(f"r={cfg.r} must be smaller than min(dims)={min(m, i, j)}")
    return _admm(Y, mask, cfg, tensor_form=True, use_ar=False, callback=callback)
