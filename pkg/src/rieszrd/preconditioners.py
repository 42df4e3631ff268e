"""Preconditioners for I + J behind one apply-inverse interface.

All kinds are applied by diagonalization: forward transform, elementwise
divide by a precomputed positive eigenvalue grid, inverse transform.  The
tau kind uses the 2-D DST, the circulant kinds the 2-D FFT.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import fft as sfft

from .frac_coeffs import fcd_weights
from .operators import DiscreteOperator
from .transforms import correction_eigenvalues, dst1_2d, tau_eigenvalues, tau_projection

# Eigen grids this close to zero abort construction instead of being
# regularized; masking a near-singular preconditioner would corrupt
# iteration-count comparisons.
_MIN_EIGEN = 1e-14

_MAX_IMAG = 1e-12


class PreconditionerKind(Enum):
    IDENTITY = "identity"
    TAU = "tau"
    STRANG_CIRCULANT = "strang"
    CHAN_CIRCULANT = "chan"


@dataclass(frozen=True)
class TauPreconditioner:
    """Eigenvalue grid of the tau approximation, shaped (ny, nx):
    ``grid[j,i] = 1 + eta_x lam_x[i] + eta_y lam_y[j]``."""

    eigen_grid: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.eigen_grid, dtype=float)
        g.flags.writeable = False
        object.__setattr__(self, "eigen_grid", g)


@dataclass(frozen=True)
class CirculantPreconditioner:
    """Real Fourier eigenvalue grid of a circulant approximation, (ny, nx)."""

    eigen_grid: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.eigen_grid, dtype=float)
        g.flags.writeable = False
        object.__setattr__(self, "eigen_grid", g)


def direction_tau_eigenvalues(order, n) -> np.ndarray:
    """Per-direction spectrum of the 1-D tau approximation: the tau projection
    of the FCD Toeplitz matrix times the tridiagonal correction factor."""
    g = fcd_weights(order, n)
    return correction_eigenvalues(order, n) * tau_eigenvalues(tau_projection(g.weights))


def build_tau(op: DiscreteOperator) -> TauPreconditioner:
    """Assemble the 2-D tau eigenvalue grid for ``I + J``."""
    lam_x = direction_tau_eigenvalues(op.order_x, op.grid.nx)
    lam_y = direction_tau_eigenvalues(op.order_y, op.grid.ny)
    grid = 1.0 + op.eta_x * lam_x[None, :] + op.eta_y * lam_y[:, None]
    if grid.min() <= 0.0:
        raise ValueError(
            f"tau eigen grid has non-positive entry {grid.min():.3e}; "
            "this indicates a bug, the grid is positive by construction"
        )
    return TauPreconditioner(grid)


def apply_tau_inverse(p: TauPreconditioner, r) -> np.ndarray:
    """Solve the tau system: DST, divide by the eigen grid, DST back."""
    ny, nx = p.eigen_grid.shape
    r = np.asarray(r, dtype=float)
    if r.shape != (ny * nx,):
        raise ValueError(f"field vector has shape {r.shape}, expected ({ny * nx},)")
    R = r.reshape(ny, nx)
    return dst1_2d(dst1_2d(R) / p.eigen_grid).reshape(-1)


def strang_first_column(t) -> np.ndarray:
    """Strang circulant of a symmetric Toeplitz matrix: copy the central
    diagonals, mirror the rest."""
    t = np.asarray(t, dtype=float)
    n = len(t)
    half = n // 2
    c = np.empty(n)
    c[: half + 1] = t[: half + 1]
    for k in range(half + 1, n):
        c[k] = t[n - k]
    return c


def chan_first_column(t) -> np.ndarray:
    """T. Chan circulant: the Frobenius-norm-closest circulant,
    ``c_k = ((n-k) t_k + k t_{n-k}) / n``."""
    t = np.asarray(t, dtype=float)
    n = len(t)
    k = np.arange(n)
    t_wrap = np.concatenate(([t[0]], t[1:][::-1]))  # t[(n-k) mod n]
    return ((n - k) * t + k * t_wrap) / n


def _circulant_eigenvalues(first_column) -> np.ndarray:
    lam = sfft.fft(first_column)
    worst = np.abs(lam.imag).max()
    if worst > _MAX_IMAG:
        raise ValueError(
            f"circulant spectrum has imaginary residue {worst:.3e}; "
            "first column is not symmetric"
        )
    return lam.real


def build_circulant(op: DiscreteOperator, kind: PreconditionerKind) -> CirculantPreconditioner:
    """Assemble the 2-D Fourier eigenvalue grid for a circulant approximation
    of ``I + J``.  Construction fails on a non-positive grid (the Strang
    variant can be indefinite for some symbols)."""
    if kind == PreconditionerKind.STRANG_CIRCULANT:
        pick = strang_first_column
    elif kind == PreconditionerKind.CHAN_CIRCULANT:
        pick = chan_first_column
    else:
        raise ValueError(f"not a circulant kind: {kind}")
    lam_x = _circulant_eigenvalues(pick(op.weights_x.weights))
    lam_y = _circulant_eigenvalues(pick(op.weights_y.weights))
    grid = 1.0 + op.eta_x * lam_x[None, :] + op.eta_y * lam_y[:, None]
    if grid.min() <= _MIN_EIGEN:
        raise ValueError(
            f"{kind.value} eigen grid entry {grid.min():.3e} is not safely positive; "
            "refusing to build an (almost) singular preconditioner"
        )
    return CirculantPreconditioner(grid)


def apply_circulant_inverse(p: CirculantPreconditioner, r) -> np.ndarray:
    """Solve the circulant system: FFT2, divide, inverse FFT2, real part."""
    ny, nx = p.eigen_grid.shape
    r = np.asarray(r, dtype=float)
    if r.shape != (ny * nx,):
        raise ValueError(f"field vector has shape {r.shape}, expected ({ny * nx},)")
    R = r.reshape(ny, nx)
    return sfft.ifft2(sfft.fft2(R) / p.eigen_grid).real.reshape(-1)


def build_preconditioner(op: DiscreteOperator, kind: PreconditionerKind):
    """Build the preconditioner of the requested kind; None for identity."""
    if kind == PreconditionerKind.IDENTITY:
        return None
    if kind == PreconditionerKind.TAU:
        return build_tau(op)
    return build_circulant(op, kind)


def inverse_action(precond):
    """Wrap a preconditioner as a callable on flat field vectors (None stays
    None, meaning plain CG)."""
    if precond is None:
        return None
    if isinstance(precond, TauPreconditioner):
        return lambda r: apply_tau_inverse(precond, r)
    if isinstance(precond, CirculantPreconditioner):
        return lambda r: apply_circulant_inverse(precond, r)
    raise TypeError(f"unknown preconditioner object: {type(precond).__name__}")
