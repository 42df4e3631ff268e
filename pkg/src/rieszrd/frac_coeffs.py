"""Stencil weights and generating functions for the Riesz fractional derivative.

Two symmetric stencil families are provided: the second-order fractional
centered difference (FCD) weights and their fourth-order correction.  A
table stores the one-sided half ``w[0..n-1]``; the full stencil satisfies
``w[-k] = w[k]``.  Each family is the Fourier coefficient sequence of its
generating function, exposed here for spectral analysis and as a test
oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np


class WeightKind(Enum):
    SECOND_ORDER_FCD = "fcd2"
    FOURTH_ORDER = "fourth4"


@dataclass(frozen=True)
class FractionalOrder:
    """A differentiation order restricted to the open interval (1, 2)."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if not (1.0 < v < 2.0):
            raise ValueError(f"fractional order must lie in (1, 2), got {self.value!r}")
        object.__setattr__(self, "value", v)


def _order_value(order) -> float:
    """Accept a FractionalOrder or a bare float (for symbol sanity points)."""
    return order.value if isinstance(order, FractionalOrder) else float(order)


@dataclass(frozen=True)
class WeightTable:
    """One-sided half of a symmetric stencil: ``weights[k]`` is the value at
    offsets +k and -k."""

    order: FractionalOrder
    kind: WeightKind
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return len(self.weights)

    def full_stencil(self) -> np.ndarray:
        """Two-sided stencil ``[w_{n-1}, ..., w_1, w_0, w_1, ..., w_{n-1}]``."""
        w = self.weights
        return np.concatenate([w[:0:-1], w])


@lru_cache(maxsize=None)
def _fcd_half(gamma: float, n: int) -> np.ndarray:
    # Ratio recurrence instead of the closed Gamma form: the latter evaluates
    # Gamma at negative non-integer arguments for k >= 2.
    w = np.empty(n)
    w[0] = math.gamma(gamma + 1.0) / math.gamma(gamma / 2.0 + 1.0) ** 2
    for k in range(n - 1):
        w[k + 1] = w[k] * (k - gamma / 2.0) / (k + 1.0 + gamma / 2.0)
    w.flags.writeable = False
    return w


def fcd_weights(order: FractionalOrder, n: int) -> WeightTable:
    """Second-order FCD weights g_0 .. g_{n-1} for the given order.

    Computed by the forward recurrence
    ``g_{k+1} = g_k (k - gamma/2) / (k + 1 + gamma/2)`` started from
    ``g_0 = Gamma(gamma+1) / Gamma(gamma/2+1)^2``.  Tables are cached per
    (order, n) since solver runs rebuild them frequently.
    """
    if n < 1:
        raise ValueError("weight table needs n >= 1")
    return WeightTable(order, WeightKind.SECOND_ORDER_FCD, _fcd_half(order.value, n))


def fourth_order_weights(order: FractionalOrder, n: int) -> WeightTable:
    """Fourth-order weights s_k = g_k [1 + g(g+1)(g+2) / (6 (g-2k+2)(g+2k+2))].

    The bracket denominator never vanishes for integer k while the order
    stays strictly inside (1, 2).
    """
    if n < 1:
        raise ValueError("weight table needs n >= 1")
    g = order.value
    k = np.arange(n)
    bracket = 1.0 + g * (g + 1.0) * (g + 2.0) / (
        6.0 * (g - 2.0 * k + 2.0) * (g + 2.0 * k + 2.0)
    )
    return WeightTable(order, WeightKind.FOURTH_ORDER, _fcd_half(g, n) * bracket)


def generating_fcd(order, theta):
    """FCD symbol ``(2 - 2 cos(theta))^(gamma/2)``; vectorized over theta."""
    g = _order_value(order)
    th = np.asarray(theta, dtype=float)
    out = (2.0 - 2.0 * np.cos(th)) ** (g / 2.0)
    return out if out.ndim else float(out)


def generating_fourth_order(order, theta):
    """Fourth-order symbol ``[1 + (gamma/6) sin^2(theta/2)] [2 |sin(theta/2)|]^gamma``.

    Equivalent to ``[1 + (gamma/24)(2 - 2 cos(theta))] (2 - 2 cos(theta))^(gamma/2)``;
    the sine form is used because it is explicit about the sign at negative
    angles.
    """
    g = _order_value(order)
    th = np.asarray(theta, dtype=float)
    s = np.abs(np.sin(0.5 * th))
    out = (1.0 + (g / 6.0) * s * s) * (2.0 * s) ** g
    return out if out.ndim else float(out)
