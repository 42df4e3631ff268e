"""Two-step linearized Crank-Nicolson time integrator and benchmark problems.

Each step solves ``(I + J) U^{m+1} = (I - J) U^m + dt (3/2 F^m - 1/2 F^{m-1})``
where both source vectors are evaluated at the half step ``t_m + dt/2``:
``F^m`` with the current field and ``F^{m-1}`` with the previous one.  The
first step uses ``U^{-1} := U^0``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .frac_coeffs import FractionalOrder, _order_value
from .krylov import SolveReport, SolverConfig, pcg
from .operators import DiscreteOperator, GridSpec, apply_explicit, apply_implicit
from .preconditioners import build_preconditioner, inverse_action


@dataclass(frozen=True)
class ProblemSpec:
    """A reaction-diffusion problem on a rectangle with zero exterior values.

    ``source``, ``initial`` and ``exact`` must accept numpy arrays (they are
    evaluated on full coordinate grids); ``source(x, y, t, u)`` is assumed
    Lipschitz in u, which is not checked.
    """

    x_left: float
    x_right: float
    y_down: float
    y_up: float
    k_x: float
    k_y: float
    order_x: FractionalOrder
    order_y: FractionalOrder
    t_final: float
    source: Callable
    initial: Callable
    exact: Optional[Callable] = None

    def __post_init__(self):
        if self.k_x <= 0 or self.k_y <= 0:
            raise ValueError("diffusion constants must be positive")
        if self.t_final <= 0:
            raise ValueError("final time must be positive")
        if not (self.x_right > self.x_left and self.y_up > self.y_down):
            raise ValueError("domain bounds must be increasing")

    def grid(self, nx: int, ny: int) -> GridSpec:
        return GridSpec(self.x_left, self.x_right, self.y_down, self.y_up, nx, ny)


@dataclass
class TimeStepState:
    """Fields entering step m: ``u_curr = U^m`` and ``u_prev = U^{m-1}``."""

    m: int
    u_curr: np.ndarray
    u_prev: np.ndarray

    @classmethod
    def start(cls, u0: np.ndarray) -> "TimeStepState":
        u0 = np.asarray(u0, dtype=float)
        return cls(0, u0, u0.copy())


class StepFailure(RuntimeError):
    """The linear solve of a time step hit the iteration cap."""

    def __init__(self, report: SolveReport, m: int):
        super().__init__(
            f"step {m}: solver stopped at {report.iterations} iterations with "
            f"relative residual {report.final_relative_residual:.3e}"
        )
        self.report = report
        self.m = m


def source_vector(problem: ProblemSpec, grid: GridSpec, t_half: float, u) -> np.ndarray:
    """Evaluate the source pointwise on the grid, x-fastest."""
    X, Y = grid.meshes
    U = np.asarray(u, dtype=float).reshape(grid.ny, grid.nx)
    vals = np.asarray(problem.source(X, Y, t_half, U), dtype=float)
    vals = np.broadcast_to(vals, (grid.ny, grid.nx))
    if not np.isfinite(vals).all():
        j, i = np.argwhere(~np.isfinite(vals))[0]
        raise ValueError(
            f"source is not finite at node (x={X[j, i]:.6g}, y={Y[j, i]:.6g}), "
            f"t={t_half:.6g}"
        )
    return vals.reshape(-1).copy()


def step(
    op: DiscreteOperator,
    problem: ProblemSpec,
    state: TimeStepState,
    dt: float,
    cfg: SolverConfig,
    pinv=None,
) -> tuple[TimeStepState, int]:
    """Advance one time step; returns the new state and the solver iterations.

    ``pinv`` may carry a prebuilt inverse-preconditioner action; otherwise it
    is built from ``cfg`` (run loops prebuild it once).
    """
    if pinv is None and cfg.preconditioner is not None:
        pinv = inverse_action(build_preconditioner(op, cfg.preconditioner))
    t_half = (state.m + 0.5) * dt
    f_curr = source_vector(problem, op.grid, t_half, state.u_curr)
    f_prev = source_vector(problem, op.grid, t_half, state.u_prev)
    rhs = apply_explicit(op, state.u_curr) + dt * (1.5 * f_curr - 0.5 * f_prev)
    report = pcg(lambda v: apply_implicit(op, v), pinv, rhs, cfg)
    if not report.converged:
        raise StepFailure(report, state.m)
    return TimeStepState(state.m + 1, report.solution, state.u_curr), report.iterations


@dataclass
class RunResult:
    u_final: np.ndarray
    iterations: list[int] = field(default_factory=list)
    wall_seconds: float = 0.0
    grid: Optional[GridSpec] = None
    dt: float = 0.0

    @property
    def average_iterations(self) -> float:
        return float(np.mean(self.iterations)) if self.iterations else 0.0


def run(problem: ProblemSpec, m_steps: int, nx: int, ny: int, cfg: SolverConfig) -> RunResult:
    """Integrate from t=0 to t_final in ``m_steps`` uniform steps.

    Weight tables, the operator and the preconditioner are built once; the
    per-step linear systems start from a zero initial guess.
    """
    if m_steps < 1:
        raise ValueError("need at least one time step")
    grid = problem.grid(nx, ny)
    dt = problem.t_final / m_steps
    op = DiscreteOperator(grid, problem.order_x, problem.order_y, problem.k_x, problem.k_y, dt)
    pinv = inverse_action(build_preconditioner(op, cfg.preconditioner))
    X, Y = grid.meshes
    u0 = np.broadcast_to(np.asarray(problem.initial(X, Y), dtype=float), (ny, nx))
    state = TimeStepState.start(u0.reshape(-1).copy())
    counts = []
    t0 = time.perf_counter()
    for _ in range(m_steps):
        state, its = step(op, problem, state, dt, cfg, pinv=pinv)
        counts.append(its)
    wall = time.perf_counter() - t0
    return RunResult(state.u_curr, counts, wall, grid, dt)


def fisher_problem(order_x, order_y) -> ProblemSpec:
    """The fractional Fisher benchmark on the unit square.

    Diffusion constants 5 and 30, final time 1, reaction ``u(1-u)`` plus a
    forcing chosen so that ``1e5 e^{-t} x^5(1-x)^5 y^5(1-y)^5`` solves the
    problem exactly.  Gamma ratios in the forcing use log-Gamma differences.
    """
    ox = order_x if isinstance(order_x, FractionalOrder) else FractionalOrder(order_x)
    oy = order_y if isinstance(order_y, FractionalOrder) else FractionalOrder(order_y)
    k_x, k_y, rho = 5.0, 30.0, 1.0e5
    ax, by = ox.value, oy.value
    fac_x = k_x / (2.0 * math.cos(ax * math.pi / 2.0))
    fac_y = k_y / (2.0 * math.cos(by * math.pi / 2.0))

    def bump(z):
        return z**5 * (1.0 - z) ** 5

    def deriv_sum(z, g):
        # Left-plus-right Riemann-Liouville derivative of z^5 (1-z)^5 on (0,1),
        # expanded over the monomial basis.
        out = 0.0
        for k in range(6):
            coef = (-1.0) ** (5 - k) * math.comb(5, k) * math.exp(
                math.lgamma(11 - k) - math.lgamma(11 - k - g)
            )
            out = out + coef * (z ** (10 - k - g) + (1.0 - z) ** (10 - k - g))
        return out

    spatial_cache: dict = {}

    def spatial_parts(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        key = None
        if x.ndim == 2 and x.shape == y.shape:
            key = (
                x.shape,
                float(x.flat[0]),
                float(x.flat[-1]),
                float(y.flat[0]),
                float(y.flat[-1]),
            )
            hit = spatial_cache.get(key)
            if hit is not None:
                return hit
        bump_xy = bump(x) * bump(y)
        forcing = (
            fac_x * bump(y) * deriv_sum(x, ax)
            + fac_y * bump(x) * deriv_sum(y, by)
            - bump_xy
        )
        if key is not None:
            if len(spatial_cache) > 8:
                spatial_cache.clear()
            spatial_cache[key] = (bump_xy, forcing)
        return bump_xy, forcing

    def exact(x, y, t):
        return rho * np.exp(-t) * bump(np.asarray(x, dtype=float)) * bump(
            np.asarray(y, dtype=float)
        )

    def initial(x, y):
        return exact(x, y, 0.0)

    def source(x, y, t, u):
        bump_xy, forcing = spatial_parts(x, y)
        u_exact = rho * np.exp(-t) * bump_xy
        return u * (1.0 - u) + rho * np.exp(-t) * forcing - u_exact * (1.0 - u_exact)

    return ProblemSpec(
        x_left=0.0,
        x_right=1.0,
        y_down=0.0,
        y_up=1.0,
        k_x=k_x,
        k_y=k_y,
        order_x=ox,
        order_y=oy,
        t_final=1.0,
        source=source,
        initial=initial,
        exact=exact,
    )


PROBLEMS = {"fisher": fisher_problem}
