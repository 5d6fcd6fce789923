"""Shared domain types: points, weight schedules, objectives, payoffs, traces.

Everything here is immutable value data after construction and safe to share
read-only across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np


class DegenerateGradientError(RuntimeError):
    """Adaptive weighting saw a gradient norm below the admissible floor."""


class UnsupportedOperationError(ValueError):
    """Operation undefined for this set / regularizer / objective combination."""


def as_point(x, dim: Optional[int] = None) -> np.ndarray:
    """Validate a vector: 1-D, finite coordinates, length >= 1.

    Returns a float64 copy. Raises ValueError on bad shape, non-finite
    entries, or a dimension mismatch when ``dim`` is given.
    """
    p = np.array(x, dtype=float)
    if p.ndim == 0:
        p = p.reshape(1)
    if p.ndim != 1 or p.size < 1:
        raise ValueError(f"point must be a 1-D vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError("point has non-finite coordinates")
    if dim is not None and p.size != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {p.size}")
    return p


# ---------------------------------------------------------------------------
# Weight schedules

UNIFORM = "uniform"
LINEAR = "linear"
ADAPTIVE_INV_GRAD_SQ = "adaptive-inv-grad-sq"

_KINDS = (UNIFORM, LINEAR, ADAPTIVE_INV_GRAD_SQ)


@dataclass(frozen=True)
class WeightSchedule:
    """Rule producing the per-round weight of the loss stream.

    kind:  "uniform" (1 for every round), "linear" (round index t), or
           "adaptive-inv-grad-sq" (inverse squared gradient norm).
    floor: minimum admissible gradient norm for the adaptive kind; a
           gradient below it aborts the run rather than being clamped.
    """

    kind: str
    floor: float = 1e-10

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if self.floor <= 0:
            raise ValueError("floor must be positive")

    @staticmethod
    def uniform() -> "WeightSchedule":
        return WeightSchedule(UNIFORM)

    @staticmethod
    def linear() -> "WeightSchedule":
        return WeightSchedule(LINEAR)

    @staticmethod
    def adaptive_inv_grad_sq(floor: float = 1e-10) -> "WeightSchedule":
        return WeightSchedule(ADAPTIVE_INV_GRAD_SQ, floor)


def emit_weight(schedule: WeightSchedule, t: int, grad=None) -> float:
    """Weight of round t under the schedule. Deterministic in (kind, t, grad)."""
    if t < 1:
        raise ValueError("round index starts at 1")
    if schedule.kind == UNIFORM:
        return 1.0
    if schedule.kind == LINEAR:
        return float(t)
    if grad is None:
        raise ValueError("adaptive schedule needs the round gradient")
    return inverse_grad_sq_weight(grad, schedule.floor)


def inverse_grad_sq_weight(grad, floor: float) -> float:
    """1 / ||grad||^2 with a hard floor on the gradient norm."""
    g = np.asarray(grad, dtype=float)
    norm = float(np.linalg.norm(g))
    if norm < floor:
        raise DegenerateGradientError(
            f"gradient norm {norm:.3e} below floor {floor:.3e}; the lower-bound "
            "assumption on gradient norms is violated (optimum likely interior)"
        )
    return 1.0 / (norm * norm)


def weighted_average(points: Sequence, weights: Sequence) -> np.ndarray:
    """sum_s w_s p_s / sum_s w_s for positive weights over same-dim points."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("weights must be a nonempty 1-D sequence")
    if np.any(w <= 0):
        raise ValueError("weights must be positive")
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(len(w), -1) if pts.size == w.size else pts
    if pts.ndim != 2 or pts.shape[0] != w.size:
        raise ValueError("points and weights length mismatch")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points contain non-finite coordinates")
    return pts.T @ w / w.sum()


# ---------------------------------------------------------------------------
# Objectives and payoffs

@dataclass(frozen=True)
class SmoothObjective:
    """A smooth convex function with known curvature constants.

    value / gradient are callables on 1-D vectors (gradient must broadcast
    over a leading axis).  L is the smoothness constant, sigma the strong
    convexity modulus (0 = merely convex).
    """

    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    L: float
    sigma: float = 0.0

    def __post_init__(self):
        if self.L <= 0:
            raise ValueError("L must be positive")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")


def finite_difference_gradient(f, x, rel_step: float = 1e-6) -> np.ndarray:
    """Central-difference gradient with step h = rel_step * (1 + ||x||)."""
    x = np.asarray(x, dtype=float)
    h = rel_step * (1.0 + float(np.linalg.norm(x)))
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2.0 * h)
    return g


@dataclass(frozen=True)
class GameConstants:
    """Curvature and bound constants attached to a payoff.

    L: smoothness of the payoff in the first argument.
    sigma_x / sigma_y: strong convexity in x / strong concavity in y.
    G: uniform upper bound on the first player's loss gradients.
    B: lower bound on gradient norms over the second player's set
       (0 when no such bound holds).
    D: diameter-scale constant (sup of the regularizer over the set).
    """

    L: float
    sigma_x: float = 0.0
    sigma_y: float = 0.0
    G: float = 1.0
    B: float = 0.0
    D: float = 1.0

    def __post_init__(self):
        if self.L <= 0 or self.G <= 0 or self.D <= 0:
            raise ValueError("L, G, D must be positive")
        if self.sigma_x < 0 or self.sigma_y < 0 or self.B < 0:
            raise ValueError("sigma_x, sigma_y, B must be nonnegative")
        if self.sigma_x > self.L * (1 + 1e-12):
            raise ValueError("sigma_x cannot exceed L")


@dataclass(frozen=True)
class GamePayoff:
    """A convex-concave payoff g(x, y) with its oracles.

    All callables broadcast over leading axes of their vector arguments, so
    g(X, y) with X of shape (n, d) returns n values.  best_response_y(x)
    returns an exact maximizer of g(x, .) over the y-set; best_response_x a
    minimizer of g(., y); argmin_weighted_x the exact minimizer of
    sum_s w_s g(., y_s).  argmax_weighted_y is the matching comparator
    oracle for the second player (None = fall back to a grid).

    v_star is the game value when known in closed form, never estimated.
    x_grid / y_grid return dense sample grids of the action sets for
    brute-force verification (only provided in low dimension).
    s_argmin_interior records whether the unconstrained minimizer of the
    best-response envelope lies inside the x-set (None = unchecked).
    """

    g: Callable
    grad_x: Callable
    grad_y: Callable
    best_response_x: Callable
    best_response_y: Callable
    argmin_weighted_x: Callable
    constants: GameConstants
    argmax_weighted_y: Optional[Callable] = None
    v_star: Optional[float] = None
    set_x: Optional[object] = None
    set_y: Optional[object] = None
    x_grid: Optional[Callable] = None
    y_grid: Optional[Callable] = None
    dim_x: Optional[int] = None
    dim_y: Optional[int] = None
    s_argmin_interior: Optional[bool] = None


@dataclass(frozen=True)
class GameTrace:
    """Full record of one game run.

    xs, ys are (T, d) arrays of iterates, alphas the (T,) weight sequence,
    losses_x[t] = g(x_t, y_t) and losses_y[t] = -g(x_t, y_t).  x_bar, y_bar
    are the alpha-weighted averages, regret_x / regret_y the weighted
    regrets against the exact comparators, gap the equilibrium gap of
    (x_bar, y_bar).
    """

    xs: np.ndarray
    ys: np.ndarray
    alphas: np.ndarray
    A_T: float
    x_bar: np.ndarray
    y_bar: np.ndarray
    losses_x: np.ndarray
    losses_y: np.ndarray
    regret_x: float
    regret_y: float
    gap: float

    @property
    def T(self) -> int:
        return len(self.alphas)

    def running_y_averages(self) -> np.ndarray:
        """ybar_t for every prefix t, as a (T, d) array."""
        num = np.cumsum(self.alphas[:, None] * self.ys, axis=0)
        den = np.cumsum(self.alphas)
        return num / den[:, None]

    def running_x_averages(self) -> np.ndarray:
        num = np.cumsum(self.alphas[:, None] * self.xs, axis=0)
        den = np.cumsum(self.alphas)
        return num / den[:, None]
