"""Third-order tensor algebra for multivariate time series matrices.

A data matrix ``Y`` of shape ``(M, T)`` holds ``M`` sensor series of
length ``T``.  When ``T = I * J`` (``I`` steps per day, ``J`` days) the
matrix can be rearranged into a tensor of shape ``(M, I, J)`` whose
frontal slice ``j`` holds day ``j``: ``tensorize(Y, I, J)[m, i, j] ==
Y[m, j * I + i]``.  Columns of ``Y`` are therefore grouped day by day,
and ``tensorize`` coincides with the mode-1 ``fold``.

Unfoldings follow the convention where row ``k`` of the mode-``k``
unfolding indexes the chosen mode and the remaining axes are flattened
in ascending order with the earlier axis varying fastest.  Other
libraries flatten the trailing axes in the opposite order; results that
depend on element order within an unfolding are not comparable across
conventions.
"""

from __future__ import annotations

import numpy as np

MODES = (1, 2, 3)


def _as_tensor(tensor: np.ndarray) -> np.ndarray:
    t = np.asarray(tensor, dtype=float)
    if t.ndim != 3:
        raise ValueError(f"expected a third-order tensor, got shape {t.shape}")
    return t


def _check_mode(mode: int) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def unfold(tensor: np.ndarray, mode: int) -> np.ndarray:
    """Mode-``mode`` unfolding of a third-order tensor.

    Parameters
    ----------
    tensor : ndarray, shape (d1, d2, d3)
    mode : int
        Which axis (1, 2 or 3) indexes the rows of the result.

    Returns
    -------
    ndarray, shape (d_mode, prod of the remaining dims)
        The remaining axes are flattened in ascending order, earlier
        axis varying fastest.
    """
    t = _as_tensor(tensor)
    _check_mode(mode)
    n = t.shape[mode - 1]
    return np.ascontiguousarray(
        np.reshape(np.moveaxis(t, mode - 1, 0), (n, -1), order="F")
    )


def fold(matrix: np.ndarray, mode: int, dims: tuple[int, int, int]) -> np.ndarray:
    """Inverse of :func:`unfold`: rebuild the tensor of shape ``dims``."""
    _check_mode(mode)
    dims = tuple(int(d) for d in dims)
    if len(dims) != 3 or any(d <= 0 for d in dims):
        raise ValueError(f"dims must be three positive integers, got {dims}")
    mat = np.asarray(matrix, dtype=float)
    rest = [dims[k] for k in range(3) if k != mode - 1]
    expected = (dims[mode - 1], rest[0] * rest[1])
    if mat.ndim != 2 or mat.shape != expected:
        raise ValueError(
            f"matrix shape {mat.shape} does not match mode-{mode} unfolding "
            f"{expected} of dims {dims}"
        )
    t = np.moveaxis(np.reshape(mat, [dims[mode - 1]] + rest, order="F"), 0, mode - 1)
    return np.ascontiguousarray(t)


def tensorize(matrix: np.ndarray, periods: int, blocks: int) -> np.ndarray:
    """Rearrange an ``(M, periods * blocks)`` matrix into ``(M, periods, blocks)``.

    Column ``j * periods + i`` of the matrix becomes entry ``[:, i, j]``
    of the tensor, so each frontal slice holds one block (day) of
    ``periods`` consecutive time steps.  This is exactly the mode-1
    :func:`fold`.
    """
    mat = np.asarray(matrix, dtype=float)
    if mat.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {mat.shape}")
    m, t = mat.shape
    if t != periods * blocks:
        raise ValueError(
            f"matrix has {t} columns, cannot split into {periods} x {blocks}"
        )
    return fold(mat, 1, (m, periods, blocks))


def detensorize(tensor: np.ndarray) -> np.ndarray:
    """Inverse of :func:`tensorize`: back to the ``(M, T)`` matrix."""
    return unfold(_as_tensor(tensor), 1)


def project(values: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Keep entries where ``mask`` is true, zero elsewhere."""
    v = np.asarray(values, dtype=float)
    m = np.asarray(mask, dtype=bool)
    if v.shape != m.shape:
        raise ValueError(f"values shape {v.shape} != mask shape {m.shape}")
    return np.where(m, v, 0.0)


def frobenius_norm(array: np.ndarray) -> float:
    """Frobenius norm of an array of any shape."""
    return float(np.linalg.norm(np.asarray(array, dtype=float).ravel()))


def tensor_inner(a: np.ndarray, b: np.ndarray) -> float:
    """Euclidean inner product of two equally shaped arrays."""
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    return float(np.dot(x.ravel(), y.ravel()))
