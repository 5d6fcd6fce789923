"""The weighted no-regret game loop with regret and equilibrium-gap accounting.

Round order is fixed: the x-player moves first and never sees the current
round (optimistic learners only reuse past information); the y-player may be
prescient and then receives x_t before choosing y_t.  The round weight is
computed after both moves (the adaptive kind needs grad_x at (x_t, y_t)) and
is then reported to both learners together with their weighted losses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    GamePayoff,
    GameTrace,
    WeightSchedule,
    emit_weight,
    weighted_average,
)

GAP_SLACK = 1e-9


# ---------------------------------------------------------------------------
# Players: thin adapters binding learners to a payoff side

class BestResponsePlayer:
    """Prescient exact best response through the payoff oracle."""

    prescient = True

    def __init__(self, payoff: GamePayoff, side: str = "y"):
        if side == "y":
            self._respond = payoff.best_response_y
        elif side == "x":
            self._respond = payoff.best_response_x
        else:
            raise ValueError("side must be 'x' or 'y'")

    def act(self, t, opponent=None):
        return self._respond(opponent)

    def observe(self, t, alpha, opponent, grad=None):
        pass


class FTLPlayer:
    """x-side follow-the-leader through the payoff's weighted argmin oracle.

    Round 1 has no history and plays the supplied initial point.  Weights
    are whatever the engine reports, so the same player implements plain
    FTL (linear weights) and SC-AFTL (adaptive inverse-grad-squared).
    """

    prescient = False

    def __init__(self, payoff: GamePayoff, x0):
        self.argmin = payoff.argmin_weighted_x
        self.first = np.asarray(x0, dtype=float)
        self.weights: list = []
        self.hist: list = []

    def act(self, t, opponent=None):
        if not self.hist:
            return self.first.copy()
        return self.argmin(np.asarray(self.weights), np.asarray(self.hist))

    def observe(self, t, alpha, opponent, grad=None):
        self.weights.append(float(alpha))
        self.hist.append(np.asarray(opponent, dtype=float))


class OptimisticFTLPlayer(FTLPlayer):
    """FTL with the previous opponent move replayed at the current weight.

    The hint weight must be known before the round resolves, so the player
    carries its own copy of the (deterministic) schedule rule.
    """

    def __init__(self, payoff: GamePayoff, x0, weight_fn):
        super().__init__(payoff, x0)
        self.weight_fn = weight_fn

    def act(self, t, opponent=None):
        if not self.hist:
            return self.first.copy()
        a_t = float(self.weight_fn(t))
        w = np.asarray(self.weights + [a_t])
        h = np.asarray(self.hist + [self.hist[-1]])
        return self.argmin(w, h)


class BeTheLeaderPlayer:
    """Prescient y-side leader: argmax of the weighted payoff history
    including the current round.  Needs a deterministic weight rule."""

    prescient = True

    def __init__(self, payoff: GamePayoff, weight_fn):
        if payoff.argmax_weighted_y is None:
            raise ValueError("payoff lacks the weighted argmax oracle")
        self.argmax = payoff.argmax_weighted_y
        self.weight_fn = weight_fn
        self.weights: list = []
        self.hist: list = []

    def act(self, t, opponent=None):
        w = np.asarray(self.weights + [float(self.weight_fn(t))])
        h = np.asarray(self.hist + [np.asarray(opponent, dtype=float)])
        return self.argmax(w, h)

    def observe(self, t, alpha, opponent, grad=None):
        self.weights.append(float(alpha))
        self.hist.append(np.asarray(opponent, dtype=float))


class SCAdaGradPlayer:
    """x-side strongly-convex adaptive gradient descent.

    The weighted loss alpha_t * g(., y_t) is (alpha_t * sigma_x)-strongly
    convex, so theta_t = alpha_t * sigma_x and the update steps along the
    weighted gradient with eta_t = 1/sum(theta).
    """

    prescient = False

    def __init__(self, set_x, x0, sigma_x: float):
        from .learners import SCAdaGrad

        if sigma_x <= 0:
            raise ValueError("SC-AdaGrad needs sigma_x > 0")
        self.inner = SCAdaGrad(set_x, x0)
        self.sigma_x = float(sigma_x)
        self.eta_history: list = []

    def act(self, t, opponent=None):
        return self.inner.current.copy()

    def observe(self, t, alpha, opponent, grad=None):
        if grad is None:
            raise ValueError("SC-AdaGrad needs the round gradient")
        self.inner.step(alpha * np.asarray(grad, dtype=float), alpha * self.sigma_x)
        self.eta_history.append(1.0 / self.inner.theta_sum)


# ---------------------------------------------------------------------------
# The game loop

@dataclass
class GameConfig:
    payoff: GamePayoff
    learner_x: object
    learner_y: object
    schedule: WeightSchedule
    T: int

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("T must be >= 1")


def run_game(config: GameConfig) -> GameTrace:
    """Run T rounds of the weighted no-regret dynamics and account the run."""
    payoff, px, py = config.payoff, config.learner_x, config.learner_y
    xs, ys, alphas = [], [], []
    for t in range(1, config.T + 1):
        try:
            x = np.asarray(px.act(t), dtype=float)
            if getattr(py, "prescient", False):
                y = np.asarray(py.act(t, opponent=x), dtype=float)
            else:
                y = np.asarray(py.act(t), dtype=float)
            gx = np.asarray(payoff.grad_x(x, y), dtype=float)
            alpha = emit_weight(config.schedule, t, grad=gx)
            px.observe(t, alpha, y, grad=gx)
            py.observe(t, alpha, x)
        except Exception as exc:
            if hasattr(exc, "add_note"):
                exc.add_note(f"at game round {t}")
            elif exc.args:
                exc.args = (f"at game round {t}: {exc.args[0]}",) + exc.args[1:]
            else:
                exc.args = (f"at game round {t}",)
            raise
        xs.append(x)
        ys.append(y)
        alphas.append(alpha)
    xs = np.asarray(xs)
    ys = np.asarray(ys)
    alphas = np.asarray(alphas)
    x_bar = weighted_average(xs, alphas)
    y_bar = weighted_average(ys, alphas)
    losses_x = np.asarray(payoff.g(xs, ys), dtype=float)
    trace = GameTrace(
        xs=xs,
        ys=ys,
        alphas=alphas,
        A_T=float(alphas.sum()),
        x_bar=x_bar,
        y_bar=y_bar,
        losses_x=losses_x,
        losses_y=-losses_x,
        regret_x=0.0,
        regret_y=0.0,
        gap=0.0,
    )
    rx = weighted_regret(trace, payoff, "x")
    ry = weighted_regret(trace, payoff, "y")
    gap = equilibrium_gap(payoff, x_bar, y_bar)
    return GameTrace(
        xs=xs, ys=ys, alphas=alphas, A_T=trace.A_T, x_bar=x_bar, y_bar=y_bar,
        losses_x=losses_x, losses_y=-losses_x, regret_x=rx, regret_y=ry, gap=gap,
    )


def equilibrium_gap(payoff: GamePayoff, x_bar, y_bar) -> float:
    """sup_y g(x_bar, y) - inf_x g(x, y_bar) through the best-response oracles.

    Values in [-1e-9, 0] are reported as 0; anything more negative means a
    best-response oracle returned a non-optimal point and is an error.
    """
    sup_side = float(payoff.g(x_bar, payoff.best_response_y(x_bar)))
    inf_side = float(payoff.g(payoff.best_response_x(y_bar), y_bar))
    gap = sup_side - inf_side
    if gap < -GAP_SLACK:
        raise RuntimeError(
            f"equilibrium gap {gap:.3e} is negative beyond slack; "
            "a best-response oracle is defective"
        )
    return max(gap, 0.0)


def weighted_regret(trace: GameTrace, payoff: GamePayoff, side: str) -> float:
    """Weighted regret of one side against its exact comparator.

    Summed as sum_t alpha_t (l_t(played_t) - l_t(comparator)) to keep the
    difference well-conditioned when the weights grow large.
    """
    a, xs, ys = trace.alphas, trace.xs, trace.ys
    if side == "x":
        x_star = payoff.argmin_weighted_x(a, ys)
        per_round = np.asarray(payoff.g(xs, ys)) - np.asarray(payoff.g(x_star, ys))
        return float(np.sum(a * per_round))
    if side == "y":
        y_star = _y_comparator(trace, payoff)
        # h_t(y) = -g(x_t, y): regret = sum a_t (g(x_t, y*) - g(x_t, y_t))
        per_round = np.asarray(payoff.g(xs, y_star)) - np.asarray(payoff.g(xs, ys))
        return float(np.sum(a * per_round))
    raise ValueError("side must be 'x' or 'y'")


def _y_comparator(trace: GameTrace, payoff: GamePayoff) -> np.ndarray:
    if payoff.argmax_weighted_y is not None:
        return payoff.argmax_weighted_y(trace.alphas, trace.xs)
    if payoff.y_grid is None:
        raise ValueError("no weighted argmax oracle and no grid fallback for the y side")
    grid = payoff.y_grid(1001)
    totals = np.zeros(len(grid))
    for a, x in zip(trace.alphas, trace.xs):
        totals += a * np.asarray(payoff.g(x, grid))
    return grid[int(np.argmax(totals))]


def partial_regrets(trace: GameTrace, payoff: GamePayoff):
    """Prefix regrets (both sides) for every round, as two (T,) arrays."""
    a, xs, ys = trace.alphas, trace.xs, trace.ys
    T = len(a)
    rx = np.zeros(T)
    ry = np.zeros(T)
    played = a * np.asarray(payoff.g(xs, ys))
    played_cum = np.cumsum(played)
    for t in range(1, T + 1):
        x_star = payoff.argmin_weighted_x(a[:t], ys[:t])
        rx[t - 1] = played_cum[t - 1] - float(np.sum(a[:t] * np.asarray(payoff.g(x_star, ys[:t]))))
        sub = GameTrace(
            xs=xs[:t], ys=ys[:t], alphas=a[:t], A_T=float(a[:t].sum()),
            x_bar=trace.x_bar, y_bar=trace.y_bar, losses_x=trace.losses_x[:t],
            losses_y=trace.losses_y[:t], regret_x=0.0, regret_y=0.0, gap=0.0,
        )
        y_star = _y_comparator(sub, payoff)
        ry[t - 1] = float(np.sum(a[:t] * np.asarray(payoff.g(xs[:t], y_star)))) - played_cum[t - 1]
    return rx, ry


def check_sandwich(trace: GameTrace, payoff: GamePayoff, slack: float = 1e-7) -> bool:
    """Certificate of the run: gap <= average regret sum, and when the game
    value is known, the four-way ordering around it."""
    eps = (trace.regret_x + trace.regret_y) / trace.A_T
    ok = trace.gap <= eps + slack
    if payoff.v_star is not None:
        v = payoff.v_star
        inf_side = float(payoff.g(payoff.best_response_x(trace.y_bar), trace.y_bar))
        sup_side = float(payoff.g(trace.x_bar, payoff.best_response_y(trace.x_bar)))
        ok = ok and (v - eps - slack <= inf_side <= v + slack)
        ok = ok and (v - slack <= sup_side <= v + eps + slack)
    return bool(ok)
