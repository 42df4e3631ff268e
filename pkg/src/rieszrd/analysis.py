"""Error norms, convergence orders, spectral certificates and benchmarks.

The certificates recompute, densely and per configuration, the eigenvalue
intervals that make the tau-preconditioned CG mesh-independent; they are
verification tools and refuse sizes where dense algebra stops being cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .frac_coeffs import FractionalOrder, fcd_weights, fourth_order_weights
from .krylov import SolverConfig
from .operators import DENSE_CAP, GridSpec, dense_toeplitz
from .preconditioners import PreconditionerKind, direction_tau_eigenvalues
from .scheme import ProblemSpec, RunResult, StepFailure, run
from .transforms import dst1_matrix, tau_eigenvalues, tau_projection

SPECTRUM_BOUND_LO = 3.0 / 8.0
SPECTRUM_BOUND_HI = 2.0


@dataclass
class ConvergenceRow:
    h: float
    dt: float
    error: float
    order: Optional[float] = None


def discrete_l2_error(numerical, problem: ProblemSpec, grid: GridSpec, t: float) -> float:
    """Grid-scaled l2 error ``h ||exact - numerical||_2`` at time t.

    Requires a square grid (h_x = h_y) and a problem with a known exact
    solution.
    """
    if problem.exact is None:
        raise ValueError("problem has no exact solution to compare against")
    if not math.isclose(grid.h_x, grid.h_y, rel_tol=1e-12):
        raise ValueError("discrete error norm is defined for square grids only")
    X, Y = grid.meshes
    psi = np.asarray(problem.exact(X, Y, t), dtype=float) - np.asarray(
        numerical, dtype=float
    ).reshape(grid.ny, grid.nx)
    return grid.h_x * float(np.linalg.norm(psi))


def order_between(coarse: ConvergenceRow, fine: ConvergenceRow) -> float:
    """Observed order log2(E_coarse / E_fine) between two refinement levels."""
    return math.log2(coarse.error / fine.error)


@dataclass
class SpectrumCertificate:
    order_x: float
    order_y: float
    eta_x: float
    eta_y: float
    nx: int
    ny: int
    lambda_min: float
    lambda_max: float
    bound_lo: float = SPECTRUM_BOUND_LO
    bound_hi: float = SPECTRUM_BOUND_HI

    @property
    def passed(self) -> bool:
        return self.bound_lo < self.lambda_min <= self.lambda_max < self.bound_hi

    @property
    def margin(self) -> float:
        return min(self.lambda_min - self.bound_lo, self.bound_hi - self.lambda_max)


def _dense_tau_direction(order: FractionalOrder, n: int) -> np.ndarray:
    """Dense 1-D tau approximation, materialized through its spectrum."""
    s = dst1_matrix(n)
    return (s * direction_tau_eigenvalues(order, n)) @ s


def certify_spectrum(
    order_x,
    order_y,
    k_x: float,
    k_y: float,
    dt: float,
    h: float,
    nx: int,
    ny: int,
    bound_lo: float = SPECTRUM_BOUND_LO,
    bound_hi: float = SPECTRUM_BOUND_HI,
    cap: int = DENSE_CAP,
) -> SpectrumCertificate:
    """Extreme generalized eigenvalues of (I + J, P_tau), densely.

    The generalized problem is solved with the symmetric-definite reduction
    (Cholesky of the dense preconditioner), so the eigenvalues stay real.
    """
    ox = order_x if isinstance(order_x, FractionalOrder) else FractionalOrder(order_x)
    oy = order_y if isinstance(order_y, FractionalOrder) else FractionalOrder(order_y)
    if nx * ny > cap:
        raise ValueError(f"dense certificate at {nx * ny} unknowns exceeds cap {cap}")
    eta_x = k_x * dt / (2.0 * h**ox.value)
    eta_y = k_y * dt / (2.0 * h**oy.value)

    ax = dense_toeplitz(fourth_order_weights(ox, nx))
    ay = dense_toeplitz(fourth_order_weights(oy, ny))
    system = (
        np.eye(nx * ny)
        + eta_x * np.kron(np.eye(ny), ax)
        + eta_y * np.kron(ay, np.eye(nx))
    )
    precond = (
        np.eye(nx * ny)
        + eta_x * np.kron(np.eye(ny), _dense_tau_direction(ox, nx))
        + eta_y * np.kron(_dense_tau_direction(oy, ny), np.eye(nx))
    )
    precond = 0.5 * (precond + precond.T)
    lams = scipy.linalg.eigh(system, precond, eigvals_only=True)
    return SpectrumCertificate(
        ox.value, oy.value, eta_x, eta_y, nx, ny,
        float(lams[0]), float(lams[-1]), bound_lo, bound_hi,
    )


@dataclass
class IntervalReport:
    name: str
    bound_lo: float
    bound_hi: float
    lambda_min: float
    lambda_max: float

    @property
    def passed(self) -> bool:
        return self.bound_lo < self.lambda_min <= self.lambda_max < self.bound_hi


def certify_1d_lemmas(order, n: int, cap: int = 64) -> list[IntervalReport]:
    """Per-direction eigenvalue intervals behind the 2-D spectrum bound.

    Checks, densely at size n: the tau projection against the FCD matrix in
    (1/2, 3/2); the FCD matrix against the fourth-order matrix in (1, 4/3);
    and the full direction preconditioner against the fourth-order matrix in
    (3/8, 2).
    """
    ox = order if isinstance(order, FractionalOrder) else FractionalOrder(order)
    if n > cap:
        raise ValueError(f"1-D certificates are dense; n={n} exceeds cap {cap}")
    a4 = dense_toeplitz(fourth_order_weights(ox, n))
    a2 = dense_toeplitz(fcd_weights(ox, n))
    s = dst1_matrix(n)
    tau_dense = (s * tau_eigenvalues(tau_projection(fcd_weights(ox, n).weights))) @ s
    p_dense = _dense_tau_direction(ox, n)
    pairs = [
        ("fcd_vs_tau_projection", a2, tau_dense, 0.5, 1.5),
        ("fourth_vs_fcd", a4, a2, 1.0, 4.0 / 3.0),
        ("fourth_vs_preconditioner", a4, p_dense, SPECTRUM_BOUND_LO, SPECTRUM_BOUND_HI),
    ]
    reports = []
    for name, top, bottom, lo, hi in pairs:
        lams = scipy.linalg.eigh(top, 0.5 * (bottom + bottom.T), eigvals_only=True)
        reports.append(IntervalReport(name, lo, hi, float(lams[0]), float(lams[-1])))
    return reports


@dataclass
class BenchRow:
    kind: PreconditionerKind
    cpu_seconds: Optional[float]
    average_iterations: Optional[float]
    exceeded: bool = False


def bench_preconditioners(
    problem: ProblemSpec,
    m_steps: int,
    nx: int,
    ny: int,
    kinds: list[PreconditionerKind],
    tolerance: float = 1e-10,
    max_iterations: int = 1000,
) -> list[BenchRow]:
    """Run the same integration once per preconditioner kind.

    A row whose solver hits the iteration cap is marked exceeded and carries
    no numbers, mirroring how such runs are reported.
    """
    rows = []
    for kind in kinds:
        cfg = SolverConfig(tolerance=tolerance, max_iterations=max_iterations, preconditioner=kind)
        try:
            result: RunResult = run(problem, m_steps, nx, ny, cfg)
        except StepFailure:
            rows.append(BenchRow(kind, None, None, exceeded=True))
            continue
        rows.append(BenchRow(kind, result.wall_seconds, result.average_iterations))
    return rows
