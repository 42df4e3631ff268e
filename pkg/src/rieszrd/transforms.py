"""Fast DST-I transforms and the tau matrix algebra.

The orthonormal sine transform ``S[j,k] = sqrt(2/(n+1)) sin(jk pi/(n+1))``
is symmetric and involutive.  A tau matrix is any matrix diagonalized by
S; it is determined by its first column, which makes storage O(n) and
inversion O(n log n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft

from .frac_coeffs import FractionalOrder


def dst1(v: np.ndarray) -> np.ndarray:
    """Orthonormal DST-I along the last axis.

    Computed from the imaginary part of a real FFT of the odd extension
    ``[0, v, 0, -reverse(v)]`` of length 2(n+1), so correctness does not
    depend on any library's sine-transform normalization.
    """
    v = np.asarray(v, dtype=float)
    n = v.shape[-1]
    w = np.zeros(v.shape[:-1] + (2 * n + 2,))
    w[..., 1 : n + 1] = v
    w[..., n + 2 :] = -v[..., ::-1]
    spec = sfft.rfft(w, axis=-1)
    return -spec.imag[..., 1 : n + 1] / math.sqrt(2.0 * (n + 1))


def dst1_2d(grid: np.ndarray) -> np.ndarray:
    """DST-I applied along both axes of a 2-D array (the factors commute)."""
    return dst1(dst1(grid).swapaxes(-1, -2)).swapaxes(-1, -2)


def dst1_matrix(n: int) -> np.ndarray:
    """Explicit sine-transform matrix, for dense oracles and materialization."""
    j = np.arange(1, n + 1)
    return np.sqrt(2.0 / (n + 1)) * np.sin(np.pi * np.outer(j, j) / (n + 1))


@dataclass(frozen=True)
class TauMatrix:
    """A tau-algebra matrix, stored by its first column."""

    first_column: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.first_column, dtype=float)
        if c.ndim != 1 or len(c) < 1:
            raise ValueError("first column must be a nonempty 1-D array")
        c.flags.writeable = False
        object.__setattr__(self, "first_column", c)

    @property
    def n(self) -> int:
        return len(self.first_column)


def tau_projection(toeplitz_first_column) -> TauMatrix:
    """Project a symmetric Toeplitz matrix onto the tau algebra.

    The projection subtracts a Hankel correction; in terms of first columns
    it is ``c_k = t_k - t_{k+2}`` with t padded by two zeros, so the last two
    entries pass through and tridiagonal input is left unchanged.
    """
    t = np.asarray(toeplitz_first_column, dtype=float)
    n = len(t)
    c = t.copy()
    if n >= 3:
        c[: n - 2] -= t[2:]
    return TauMatrix(c)


def tau_eigenvalues(m: TauMatrix) -> np.ndarray:
    """Eigenvalues in sine-transform ordering: DST(first column) / DST(e_1)."""
    n = m.n
    j = np.arange(1, n + 1)
    denom = np.sqrt(2.0 / (n + 1)) * np.sin(j * np.pi / (n + 1))
    return dst1(m.first_column) / denom


def correction_eigenvalues(order: FractionalOrder, n: int) -> np.ndarray:
    """Spectrum of the tridiagonal factor relating the fourth-order symbol to
    the FCD symbol (identity plus gamma/24 times the 1-D discrete Laplacian).

    Closed form ``1 + (gamma/6) sin^2(j pi / (2(n+1)))``; every value lies in
    (1, 4/3).
    """
    j = np.arange(1, n + 1)
    s = np.sin(j * np.pi / (2.0 * (n + 1)))
    return 1.0 + (order.value / 6.0) * s * s
