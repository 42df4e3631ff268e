"""Grid geometry and fast application of the two-level Toeplitz operators.

Field vectors are flat arrays in x-fastest order: entry ``j*nx + i`` holds
the value at interior node ``(x_{i+1}, y_{j+1})``.  Reshaping to ``(ny, nx)``
therefore puts x along axis 1 and y along axis 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import fft as sfft
from scipy.linalg import toeplitz

from .frac_coeffs import FractionalOrder, WeightTable, fourth_order_weights

DENSE_CAP = 4096


@dataclass(frozen=True)
class GridSpec:
    """Uniform interior grid on a rectangle; boundaries carry no unknowns."""

    x_left: float
    x_right: float
    y_down: float
    y_up: float
    nx: int
    ny: int

    def __post_init__(self):
        if not (self.x_right > self.x_left and self.y_up > self.y_down):
            raise ValueError("domain bounds must be increasing")
        if self.nx < 1 or self.ny < 1:
            raise ValueError("need at least one interior point per direction")

    @classmethod
    def unit_square(cls, nx: int, ny: int) -> "GridSpec":
        return cls(0.0, 1.0, 0.0, 1.0, nx, ny)

    @property
    def h_x(self) -> float:
        return (self.x_right - self.x_left) / (self.nx + 1)

    @property
    def h_y(self) -> float:
        return (self.y_up - self.y_down) / (self.ny + 1)

    @property
    def n(self) -> int:
        return self.nx * self.ny

    def x_nodes(self) -> np.ndarray:
        return self.x_left + self.h_x * np.arange(1, self.nx + 1)

    def y_nodes(self) -> np.ndarray:
        return self.y_down + self.h_y * np.arange(1, self.ny + 1)

    @cached_property
    def meshes(self) -> tuple[np.ndarray, np.ndarray]:
        """(X, Y) node coordinate arrays of shape (ny, nx)."""
        X, Y = np.meshgrid(self.x_nodes(), self.y_nodes())
        X.flags.writeable = False
        Y.flags.writeable = False
        return X, Y


class SymToeplitz:
    """O(n log n) action of a symmetric Toeplitz matrix via circulant embedding.

    The first column is embedded into a circulant of fast length >= 2n-1
    whose spectrum is precomputed once; applications are batched real FFT
    convolutions along any axis.
    """

    def __init__(self, first_column):
        t = np.asarray(first_column, dtype=float)
        if t.ndim != 1 or len(t) < 1:
            raise ValueError("first column must be a nonempty 1-D array")
        n = len(t)
        m = sfft.next_fast_len(max(2 * n - 1, 1), real=True)
        col = np.zeros(m)
        col[:n] = t
        if n > 1:
            col[m - n + 1 :] = t[1:][::-1]
        self.first_column = t
        self.n = n
        self._m = m
        self._spectrum = sfft.rfft(col)

    def apply(self, values: np.ndarray, axis: int = -1) -> np.ndarray:
        """Multiply every 1-D slice of ``values`` along ``axis`` by the matrix."""
        x = np.moveaxis(np.asarray(values, dtype=float), axis, -1)
        if x.shape[-1] != self.n:
            raise ValueError(f"expected length {self.n} along axis, got {x.shape[-1]}")
        spec = sfft.rfft(x, n=self._m, axis=-1)
        out = sfft.irfft(spec * self._spectrum, n=self._m, axis=-1)[..., : self.n]
        return np.moveaxis(out, -1, axis)


def sym_toeplitz_matvec(first_column, v) -> np.ndarray:
    """One-shot fast product T v with T[i,j] = t[|i-j|]."""
    return SymToeplitz(first_column).apply(np.asarray(v, dtype=float))


def dense_toeplitz(table: WeightTable) -> np.ndarray:
    """Dense symmetric Toeplitz matrix built from a weight table (oracle use)."""
    return toeplitz(table.weights)


class DiscreteOperator:
    """The 2-D operator pair I +/- J with
    ``J = eta_x (I ⊗ A_x) + eta_y (A_y ⊗ I)``.

    ``A_x``/``A_y`` are the fourth-order stencil Toeplitz matrices per
    direction and ``eta = K dt / (2 h^gamma)``.  Immutable after
    construction; applications run as batched 1-D fast matvecs.
    """

    def __init__(
        self,
        grid: GridSpec,
        order_x: FractionalOrder,
        order_y: FractionalOrder,
        k_x: float,
        k_y: float,
        dt: float,
    ):
        if k_x <= 0 or k_y <= 0:
            raise ValueError("diffusion constants must be positive")
        if dt <= 0:
            raise ValueError("time step must be positive")
        self.grid = grid
        self.order_x = order_x
        self.order_y = order_y
        self.k_x = float(k_x)
        self.k_y = float(k_y)
        self.dt = float(dt)
        self.eta_x = self.k_x * self.dt / (2.0 * grid.h_x ** order_x.value)
        self.eta_y = self.k_y * self.dt / (2.0 * grid.h_y ** order_y.value)
        self.weights_x = fourth_order_weights(order_x, grid.nx)
        self.weights_y = fourth_order_weights(order_y, grid.ny)
        self._tx = SymToeplitz(self.weights_x.weights)
        self._ty = SymToeplitz(self.weights_y.weights)


def _to_grid(op: DiscreteOperator, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (op.grid.n,):
        raise ValueError(f"field vector has shape {u.shape}, grid needs ({op.grid.n},)")
    return u.reshape(op.grid.ny, op.grid.nx)


def apply_diffusion(op: DiscreteOperator, u) -> np.ndarray:
    """Apply J: scaled Toeplitz action along x for every row and along y for
    every column of the reshaped field."""
    U = _to_grid(op, u)
    out = op.eta_x * op._tx.apply(U, axis=1) + op.eta_y * op._ty.apply(U, axis=0)
    return out.reshape(-1)


def apply_implicit(op: DiscreteOperator, u) -> np.ndarray:
    """Apply I + J (the matrix solved at each time step)."""
    return np.asarray(u, dtype=float) + apply_diffusion(op, u)


def apply_explicit(op: DiscreteOperator, u) -> np.ndarray:
    """Apply I - J (the explicit side of the time step)."""
    return np.asarray(u, dtype=float) - apply_diffusion(op, u)


def dense_assemble(op: DiscreteOperator, cap: int = DENSE_CAP) -> np.ndarray:
    """Materialize I + J densely via Kronecker products.

    Refuses above ``cap`` unknowns: the dense form exists for verification,
    not production solves.
    """
    n = op.grid.n
    if n > cap:
        raise ValueError(f"dense assembly of {n} unknowns exceeds cap {cap}")
    ax = dense_toeplitz(op.weights_x)
    ay = dense_toeplitz(op.weights_y)
    j = op.eta_x * np.kron(np.eye(op.grid.ny), ax) + op.eta_y * np.kron(
        ay, np.eye(op.grid.nx)
    )
    return np.eye(n) + j
