"""Conjugate gradient for SPD operators given as matvec actions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .preconditioners import PreconditionerKind


class NotSPDError(RuntimeError):
    """The operator or preconditioner action lost positive definiteness."""


class DivergenceError(RuntimeError):
    """A non-finite inner product appeared during the iteration."""


@dataclass
class SolverConfig:
    tolerance: float = 1e-10
    max_iterations: int = 1000
    preconditioner: PreconditionerKind = field(default=PreconditionerKind.TAU)

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass
class SolveReport:
    solution: np.ndarray
    iterations: int
    final_relative_residual: float
    converged: bool


def pcg(apply_A, apply_Pinv, b, cfg: SolverConfig) -> SolveReport:
    """Preconditioned conjugate gradient from a zero initial guess.

    ``apply_Pinv`` is the inverse action of an SPD preconditioner, or None
    for plain CG.  Stops when the (recurrence) residual satisfies
    ``||r_k|| / ||r_0|| <= tolerance``; the report carries the true residual
    of the returned iterate, recomputed once, and counts one iteration per
    loop pass.
    """
    b = np.asarray(b, dtype=float)
    x = np.zeros_like(b)
    r = b.copy()
    r0_norm = np.linalg.norm(r)
    if r0_norm == 0.0:
        # Zero right-hand side: the relative criterion is undefined, the
        # exact solution is zero.
        return SolveReport(x, 0, 0.0, True)

    z = apply_Pinv(r) if apply_Pinv is not None else r.copy()
    p = z.copy()
    rz = float(r @ z)
    iterations = 0
    for k in range(cfg.max_iterations):
        q = apply_A(p)
        pq = float(p @ q)
        if not np.isfinite(pq) or not np.isfinite(rz):
            raise DivergenceError(f"non-finite inner product at iteration {k}")
        if pq <= 0.0:
            raise NotSPDError(f"<p, Ap> = {pq:.3e} <= 0 at iteration {k}")
        alpha = rz / pq
        x += alpha * p
        r -= alpha * q
        iterations = k + 1
        if np.linalg.norm(r) / r0_norm <= cfg.tolerance:
            break
        z = apply_Pinv(r) if apply_Pinv is not None else r.copy()
        rz_next = float(r @ z)
        p = z + (rz_next / rz) * p
        rz = rz_next

    true_residual = float(np.linalg.norm(b - apply_A(x)) / r0_norm)
    return SolveReport(x, iterations, true_residual, true_residual <= cfg.tolerance)
