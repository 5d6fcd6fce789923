"""Online learning strategies over weighted loss streams.

Two families share the uniform step interface used by the game loop:

* linear-loss learners (FTRL, GaugeFTRL, OptimisticFTRL, BTRL, linear
  BestResponse) keep only the cumulative weighted loss vector, O(d) state;
* argmin-oracle learners (FTL, BeTheLeader, OptimisticFTL, SC-AFTL) defer
  the weighted minimization to an instance-supplied exact oracle.

Prescient learners see the current round's loss before acting.
"""

from __future__ import annotations

import numpy as np

from .core import (
    DegenerateGradientError,
    UnsupportedOperationError,
    as_point,
    inverse_grad_sq_weight,
)

SQUARED_L2 = "squared_l2"
SQUARED_GAUGE = "squared_gauge"


# ---------------------------------------------------------------------------
# Closed-form minimizers for linear losses

def ftrl_minimizer(set_, cumulative, eta: float, regularizer: str = SQUARED_L2):
    """argmin over the set of eta*<cumulative, x> + R(x).

    SquaredL2 (R = ||x||^2) completes the square, so the minimizer is the
    projection of -eta*cumulative/2.  SquaredGauge delegates to the
    single-oracle gauge form.
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    cumulative = as_point(cumulative)
    if regularizer == SQUARED_L2:
        return set_.project(-0.5 * eta * cumulative)
    if regularizer == SQUARED_GAUGE:
        x, _, _ = gauge_ftrl_minimizer(set_, cumulative, eta)
        return x
    raise UnsupportedOperationError(f"unknown regularizer {regularizer!r}")


def gauge_ftrl_minimizer(set_, cumulative, eta: float):
    """Minimize eta*<L, x> + gauge(x)^2 with a single linear-oracle call.

    Writing x = rho*z with z on the boundary reduces the problem to
    rho*eta*<L, z*> + rho^2 where z* = lin_opt(L); the optimal rho is
    clip(-(eta/2) <L, z*>, 0, 1).  Returns (x, rho, z*).
    """
    if not set_.contains_origin:
        raise UnsupportedOperationError("gauge regularizer needs a set containing the origin")
    cumulative = as_point(cumulative)
    z = set_.lin_opt(cumulative)
    rho = min(1.0, max(0.0, -0.5 * eta * float(cumulative @ z)))
    return rho * z, rho, z


def oftrl_minimizer(set_, cumulative, hint, eta: float, regularizer: str = SQUARED_L2):
    """Optimistic variant: the guess `hint` of the next loss vector is added
    to the cumulative vector before minimizing."""
    return ftrl_minimizer(set_, as_point(cumulative) + as_point(hint), eta, regularizer)


def best_response_step(payoff, opponent, side: str):
    """Exact best response through the payoff's oracle."""
    if side == "x":
        return payoff.best_response_x(opponent)
    if side == "y":
        return payoff.best_response_y(opponent)
    raise ValueError(f"side must be 'x' or 'y', got {side!r}")


# ---------------------------------------------------------------------------
# Linear-loss learners

class FTRL:
    """Follow the regularized leader on linear losses."""

    prescient = False

    def __init__(self, set_, dim: int, eta: float, regularizer: str = SQUARED_L2):
        self.set = set_
        self.eta = float(eta)
        self.regularizer = regularizer
        self.cumulative = np.zeros(dim)

    def act(self):
        return ftrl_minimizer(self.set, self.cumulative, self.eta, self.regularizer)

    def observe(self, weight: float, loss_vec):
        self.cumulative = self.cumulative + weight * as_point(loss_vec)


class GaugeFTRL(FTRL):
    """FTRL with the squared gauge of the decision set as regularizer."""

    def __init__(self, set_, dim: int, eta: float):
        super().__init__(set_, dim, eta, SQUARED_GAUGE)
        self.last_rho = 0.0

    def act(self):
        x, rho, _ = gauge_ftrl_minimizer(self.set, self.cumulative, self.eta)
        self.last_rho = rho
        return x


class OptimisticFTRL(FTRL):
    """FTRL with a hint vector folded into the cumulative loss."""

    def act(self, hint=None):
        cum = self.cumulative
        if hint is not None:
            cum = cum + as_point(hint)
        return ftrl_minimizer(self.set, cum, self.eta, self.regularizer)


class BTRL(FTRL):
    """Be-the-regularized-leader: prescient, includes the current round."""

    prescient = True

    def act(self, current_weighted_loss=None):
        cum = self.cumulative
        if current_weighted_loss is not None:
            cum = cum + as_point(current_weighted_loss)
        return ftrl_minimizer(self.set, cum, self.eta, self.regularizer)


class LinearBestResponse:
    """Prescient minimizer of the current linear loss over the set."""

    prescient = True

    def __init__(self, set_):
        self.set = set_

    def act(self, current_loss_vec):
        return self.set.lin_opt(current_loss_vec)

    def observe(self, weight, loss_vec):
        pass


# ---------------------------------------------------------------------------
# Argmin-oracle learners

class FollowTheLeader:
    """Plays the exact minimizer of the weighted loss history.

    The oracle receives (weights, descriptors) arrays; descriptors are
    whatever the instance uses to identify a round's loss (opponent points
    in games, quadratic centers in synthetic streams).  The first round has
    no history and plays the fixed instance-supplied point.
    """

    prescient = False

    def __init__(self, argmin_oracle, first_point):
        self.argmin = argmin_oracle
        self.first = as_point(first_point)
        self.weights: list = []
        self.history: list = []

    def act(self):
        if not self.history:
            return self.first.copy()
        return self.argmin(np.asarray(self.weights), np.asarray(self.history))

    def observe(self, weight: float, descriptor):
        if weight <= 0:
            raise ValueError("weights must be positive")
        self.weights.append(float(weight))
        self.history.append(as_point(descriptor))


class BeTheLeader(FollowTheLeader):
    """Prescient FTL: minimizes over history plus the current round."""

    prescient = True

    def act(self, current_weight=None, current_descriptor=None):
        if current_descriptor is None:
            return super().act()
        w = np.asarray(self.weights + [float(current_weight)])
        h = np.asarray(self.history + [as_point(current_descriptor)])
        return self.argmin(w, h)


class OptimisticFTL(FollowTheLeader):
    """FTL with the last loss replayed as a hint at the current weight.

    Acting at round t minimizes sum_{s<t} w_s l_s + w_t l_{t-1}, i.e. the
    history with the final descriptor duplicated at the hint weight.
    """

    def act(self, hint_weight=None):
        if not self.history:
            return self.first.copy()
        if hint_weight is None:
            return super().act()
        w = np.asarray(self.weights + [float(hint_weight)])
        h = np.asarray(self.history + [self.history[-1]])
        return self.argmin(w, h)


class SCAFTL(FollowTheLeader):
    """Adaptive FTL: the weight of each round is 1/||grad||^2.

    observe() computes the weight itself from the gradient seen at the
    played point; a norm below the floor raises DegenerateGradientError.
    """

    def __init__(self, argmin_oracle, first_point, floor: float = 1e-10):
        super().__init__(argmin_oracle, first_point)
        self.floor = float(floor)

    def observe(self, grad_for_weight, descriptor):
        a = inverse_grad_sq_weight(grad_for_weight, self.floor)
        super().observe(a, descriptor)
        return a


def golden_section_minimize(fn, lo: float, hi: float, tol: float = 1e-10) -> float:
    """1-D golden-section search for a unimodal function on [lo, hi]."""
    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = float(lo), float(hi)
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


def numeric_weighted_argmin_2d(loss_terms, weights, box_lower, box_upper,
                               tol: float = 1e-10) -> np.ndarray:
    """Safeguarded 2-D fallback argmin for payoffs without closed forms.

    Minimizes sum_s w_s loss_terms(x, s) over an axis-aligned box by nested
    golden-section search (the partial minimum of a convex function is
    convex, so both levels are unimodal).  Exact closed forms should be
    preferred wherever they exist.
    """
    w = np.asarray(weights, dtype=float)

    def total(x0, x1):
        x = np.array([x0, x1])
        return float(np.sum(w * loss_terms(x)))

    def inner_min(x0):
        x1 = golden_section_minimize(lambda t: total(x0, t),
                                     box_lower[1], box_upper[1], tol)
        return total(x0, x1), x1

    x0 = golden_section_minimize(lambda t: inner_min(t)[0],
                                 box_lower[0], box_upper[0], tol)
    _, x1 = inner_min(x0)
    return np.array([x0, x1])


class SCAdaGrad:
    """Projected gradient descent with step 1/sum(theta_s).

    Each round's loss is theta_t-strongly convex; the step aggregates the
    curvature seen so far.  theta_sum is strictly increasing.
    """

    prescient = False

    def __init__(self, set_, x0):
        self.set = set_
        self.current = as_point(x0)
        self.theta_sum = 0.0

    def step(self, grad, theta: float):
        if theta <= 0:
            raise ValueError("theta must be positive")
        self.theta_sum += float(theta)
        eta = 1.0 / self.theta_sum
        self.current = self.set.project(self.current - eta * as_point(grad, dim=self.current.size))
        return self.current.copy()
