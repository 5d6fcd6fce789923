"""Frank-Wolfe instantiations of the no-regret game loop.

Four solvers over a shared instance library:

* classic_fw        - the textbook conditional-gradient loop;
* fw_as_game        - the same trajectory produced by FTL + BestResponse
                      with linear round weights;
* new_fw            - the accelerated variant (optimistic FTL against a
                      gauge-regularized prescient leader), one linear-oracle
                      call per round;
* linear_rate_fw    - adaptive FTL on strongly convex sets with gradients
                      bounded away from zero (linear convergence);
* sc_adagrad_game   - linear-rate equilibrium computation for curved payoffs.

The conjugate of the objective is never evaluated numerically: all first-
player updates use the gradient identity argmin_x {A f*(x) - <x, v>} =
grad f(v / A), exact for the quadratic instance library.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    DegenerateGradientError,
    GameConstants,
    GamePayoff,
    GameTrace,
    SmoothObjective,
    UnsupportedOperationError,
    WeightSchedule,
    as_point,
    weighted_average,
)
from .game_engine import (
    BestResponsePlayer,
    FTLPlayer,
    GameConfig,
    OptimisticFTLPlayer,
    run_game,
)
from .learners import gauge_ftrl_minimizer
from .sets import ConvexSet


# ---------------------------------------------------------------------------
# Instance library

@dataclass(frozen=True)
class QuadraticObjective:
    """f(y) = (scale/2) ||y - c||^2, the workhorse test objective.

    Conjugate pieces are closed form: f*(x) = ||x||^2/(2 scale) + <c, x>
    and grad f*(x) = x/scale + c.
    """

    c: np.ndarray
    scale: float = 1.0

    def value(self, y):
        d = np.asarray(y, dtype=float) - self.c
        return 0.5 * self.scale * np.sum(d * d, axis=-1)

    def gradient(self, y):
        return self.scale * (np.asarray(y, dtype=float) - self.c)

    def conj_value(self, x):
        x = np.asarray(x, dtype=float)
        return np.sum(x * x, axis=-1) / (2.0 * self.scale) + np.sum(self.c * x, axis=-1)

    def conj_gradient(self, x):
        return np.asarray(x, dtype=float) / self.scale + self.c


@dataclass(frozen=True)
class FWInstance:
    """A constrained smooth minimization problem min_{y in set} f(y).

    f_min is the closed-form optimum when known (None otherwise); quad is
    the structured objective behind the conjugate identities (required by
    the game reformulation, not by classic_fw); constants bundle the
    curvature values consumed by the convergence-rate checks.
    """

    f: SmoothObjective
    set: ConvexSet
    y0: np.ndarray
    f_min: Optional[float]
    constants: GameConstants
    quad: Optional[QuadraticObjective] = None

    @property
    def dim(self) -> int:
        return self.y0.size


def quadratic_instance(c, set_: ConvexSet, scale: float = 1.0, y0=None) -> FWInstance:
    """Isotropic quadratic over a set, with exact f_min and gradient bound.

    The minimizer is the Euclidean projection of c, so f_min and the lower
    gradient bound B = scale * dist(c, set) are exact for every set kind.
    """
    c = as_point(c)
    if scale <= 0:
        raise ValueError("scale must be positive")
    quad = QuadraticObjective(c=c, scale=float(scale))
    obj = SmoothObjective(value=quad.value, gradient=quad.gradient, L=scale, sigma=scale)
    proj = set_.project(c)
    f_min = float(quad.value(proj))
    B = float(scale * np.linalg.norm(proj - c))
    if y0 is None:
        y0 = set_.lin_opt(-np.ones_like(c))
    y0 = as_point(y0, dim=c.size)
    if not set_.contains(y0, tol=1e-9):
        raise ValueError("y0 must be feasible")
    diam = set_.diameter()
    consts = GameConstants(
        L=1.0 / scale, sigma_x=1.0 / scale, sigma_y=0.0,
        G=diam, B=B, D=diam,
    )
    return FWInstance(f=obj, set=set_, y0=y0, f_min=f_min, constants=consts, quad=quad)


def fw_game_payoff(inst: FWInstance) -> GamePayoff:
    """The saddle-point reformulation g(x, y) = f*(x) - <x, y>.

    The first player ranges over the gradient space of f, the second over
    the constraint set; the game value is -min f.  All oracles are closed
    form through the conjugate identities.
    """
    if inst.quad is None:
        raise UnsupportedOperationError(
            "the game reformulation needs the structured conjugate of f")
    quad = inst.quad
    set_y = inst.set

    def g(x, y):
        return quad.conj_value(x) - np.sum(np.asarray(x, dtype=float) * np.asarray(y, dtype=float), axis=-1)

    def grad_x(x, y):
        return quad.conj_gradient(x) - np.asarray(y, dtype=float)

    def grad_y(x, y):
        return -np.broadcast_to(np.asarray(x, dtype=float), np.shape(y)).copy()

    def best_response_y(x):
        return set_y.lin_opt(np.asarray(x, dtype=float))

    def best_response_x(y):
        return quad.gradient(y)

    def argmin_weighted_x(weights, ys):
        return quad.gradient(weighted_average(ys, weights))

    def argmax_weighted_y(weights, xs):
        w = np.asarray(weights, dtype=float)
        return set_y.lin_opt(np.asarray(xs, dtype=float).T @ w)

    grids = None
    if inst.dim <= 2:
        from .sets import grid_points

        def y_grid(resolution):
            return grid_points(set_y, resolution, inst.dim)

        def x_grid(resolution):
            return quad.gradient(grid_points(set_y, resolution, inst.dim))

        grids = (x_grid, y_grid)

    return GamePayoff(
        g=g,
        grad_x=grad_x,
        grad_y=grad_y,
        best_response_x=best_response_x,
        best_response_y=best_response_y,
        argmin_weighted_x=argmin_weighted_x,
        argmax_weighted_y=argmax_weighted_y,
        constants=inst.constants,
        v_star=(-inst.f_min if inst.f_min is not None else None),
        set_x=None,
        set_y=set_y,
        x_grid=grids[0] if grids else None,
        y_grid=grids[1] if grids else None,
        dim_x=inst.dim,
        dim_y=inst.dim,
        s_argmin_interior=None,
    )


# ---------------------------------------------------------------------------
# Quadratic-bilinear payoffs (the curved-game scenarios)

def quad_bilinear_payoff(u, sigma_x, M, v, sigma_y, set_x, set_y) -> GamePayoff:
    """g(x, y) = (sigma_x/2)||x-u||^2 + x'My - (sigma_y/2)||y-v||^2.

    Best responses and weighted comparators are exact: the quadratic parts
    are isotropic, so each constrained optimum is the projection of the
    unconstrained one.  The saddle is closed form; the constructor insists
    it is interior to both sets.
    """
    u = as_point(u)
    v = as_point(v)
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if sigma_x <= 0 or sigma_y <= 0:
        raise ValueError("sigma_x and sigma_y must be positive")
    if M.shape != (u.size, v.size):
        raise ValueError("M shape must be (dim_x, dim_y)")

    def g(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        qa = 0.5 * sigma_x * np.sum((x - u) ** 2, axis=-1)
        qb = 0.5 * sigma_y * np.sum((y - v) ** 2, axis=-1)
        bil = np.sum((x @ M) * y, axis=-1)
        return qa + bil - qb

    def grad_x(x, y):
        return sigma_x * (np.asarray(x, dtype=float) - u) + np.asarray(y, dtype=float) @ M.T

    def grad_y(x, y):
        return np.asarray(x, dtype=float) @ M - sigma_y * (np.asarray(y, dtype=float) - v)

    def best_response_y(x):
        return set_y.project(v + (np.asarray(x, dtype=float) @ M) / sigma_y)

    def best_response_x(y):
        return set_x.project(u - (np.asarray(y, dtype=float) @ M.T) / sigma_x)

    def argmin_weighted_x(weights, ys):
        ybar = weighted_average(ys, weights)
        return set_x.project(u - (ybar @ M.T) / sigma_x)

    def argmax_weighted_y(weights, xs):
        xbar = weighted_average(xs, weights)
        return set_y.project(v + (xbar @ M) / sigma_y)

    # unconstrained saddle: (sigma_x I + M M'/sigma_y) x = sigma_x u - M v
    lhs = sigma_x * np.eye(u.size) + (M @ M.T) / sigma_y
    x_star = np.linalg.solve(lhs, sigma_x * u - M @ v)
    y_star = v + (M.T @ x_star) / sigma_y
    if not (set_x.contains(x_star) and set_y.contains(y_star)):
        raise ValueError("the closed-form saddle must lie inside both sets")
    v_star = float(g(x_star, y_star))

    norm_M = float(np.linalg.norm(M, 2))
    rx, ry = set_x.diameter() / 2.0, set_y.diameter() / 2.0
    G = sigma_x * (rx + float(np.linalg.norm(u))) + norm_M * (ry + float(np.linalg.norm(v)))
    consts = GameConstants(L=sigma_x, sigma_x=sigma_x, sigma_y=sigma_y, G=G, B=0.0,
                           D=max(set_x.diameter(), set_y.diameter()))

    def make_grid(set_, dim):
        from .sets import grid_points

        return lambda resolution: grid_points(set_, resolution, dim)

    return GamePayoff(
        g=g,
        grad_x=grad_x,
        grad_y=grad_y,
        best_response_x=best_response_x,
        best_response_y=best_response_y,
        argmin_weighted_x=argmin_weighted_x,
        argmax_weighted_y=argmax_weighted_y,
        constants=consts,
        v_star=v_star,
        set_x=set_x,
        set_y=set_y,
        x_grid=make_grid(set_x, u.size) if u.size <= 2 else None,
        y_grid=make_grid(set_y, v.size) if v.size <= 2 else None,
        dim_x=u.size,
        dim_y=v.size,
        s_argmin_interior=bool(set_x.contains(x_star)),
    )


def bilinear_box_payoff(M, box_x, box_y, v_star=None) -> GamePayoff:
    """g(x, y) = x'My over boxes, for small hand-checkable games.

    Flat best responses tie-break to the lexicographically largest extreme
    point (the upper corner on the flat coordinates).
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))

    def g(x, y):
        return np.sum((np.asarray(x, dtype=float) @ M) * np.asarray(y, dtype=float), axis=-1)

    def grad_x(x, y):
        return np.broadcast_to(np.asarray(y, dtype=float) @ M.T, np.shape(x)).copy()

    def grad_y(x, y):
        return np.broadcast_to(np.asarray(x, dtype=float) @ M, np.shape(y)).copy()

    def _box_argmax(box, coef):
        return np.where(coef >= 0, box.upper, box.lower)

    def _box_argmin(box, coef):
        return np.where(coef > 0, box.lower, box.upper)

    def best_response_y(x):
        return _box_argmax(box_y, np.asarray(x, dtype=float) @ M)

    def best_response_x(y):
        return _box_argmin(box_x, np.asarray(y, dtype=float) @ M.T)

    def argmin_weighted_x(weights, ys):
        w = np.asarray(weights, dtype=float)
        return _box_argmin(box_x, (np.asarray(ys, dtype=float).T @ w) @ M.T)

    def argmax_weighted_y(weights, xs):
        w = np.asarray(weights, dtype=float)
        return _box_argmax(box_y, (np.asarray(xs, dtype=float).T @ w) @ M)

    dim_x, dim_y = M.shape
    consts = GameConstants(L=max(float(np.linalg.norm(M, 2)), 1e-9), sigma_x=0.0, sigma_y=0.0,
                           G=float(np.linalg.norm(M, 2)) * (box_y.diameter() + 1.0),
                           B=0.0, D=max(box_x.diameter(), box_y.diameter()))

    def make_grid(box, dim):
        from .sets import grid_points

        return lambda resolution: grid_points(box, resolution, dim)

    return GamePayoff(
        g=g, grad_x=grad_x, grad_y=grad_y,
        best_response_x=best_response_x, best_response_y=best_response_y,
        argmin_weighted_x=argmin_weighted_x, argmax_weighted_y=argmax_weighted_y,
        constants=consts, v_star=v_star, set_x=box_x, set_y=box_y,
        x_grid=make_grid(box_x, dim_x) if dim_x <= 2 else None,
        y_grid=make_grid(box_y, dim_y) if dim_y <= 2 else None,
        dim_x=dim_x, dim_y=dim_y,
    )


def scenario_payoff(kind: int, **params):
    """Construct a payoff for one of the curved-game scenarios.

    Returns (payoff, s_smoothness) where s_smoothness is the derived
    smoothness constant of the best-response envelope s(x) = sup_y g(x, y):

    * kind 1 (separable quadratic-bilinear): ||M||^2/sigma_y + L with L the
      smoothness of the x-part;
    * kind 2 (strongly concave with interior best responses and the cross
      smoothness condition): L (1 + 2L/sigma_y);
    * kind 3 (constrained smooth minimization with gradients bounded below
      by B over a lam-strongly-convex set): 1/(lam B), the Lipschitz bound
      of the best-response map on the gradient space.
    """
    if kind == 1:
        payoff = quad_bilinear_payoff(
            params["u"], params["sigma_x"], params["M"], params["v"],
            params["sigma_y"], params["set_x"], params["set_y"],
        )
        norm_M = float(np.linalg.norm(np.atleast_2d(params["M"]), 2))
        return payoff, norm_M**2 / params["sigma_y"] + params["sigma_x"]
    if kind == 2:
        payoff = quad_bilinear_payoff(
            params["u"], params["sigma_x"], params["M"], params["v"],
            params["sigma_y"], params["set_x"], params["set_y"],
        )
        norm_M = float(np.linalg.norm(np.atleast_2d(params["M"]), 2))
        L = float(params.get("L", max(params["sigma_x"], norm_M)))
        if L < max(params["sigma_x"], norm_M):
            raise ValueError("declared L must dominate the payoff smoothness")
        return payoff, L * (1.0 + 2.0 * L / params["sigma_y"])
    if kind == 3:
        inst = params["inst"]
        lam = inst.set.lam
        B = inst.constants.B
        if lam <= 0 or B <= 0:
            raise ValueError("scenario 3 needs a strongly convex set and B > 0")
        return fw_game_payoff(inst), 1.0 / (lam * B)
    raise ValueError(f"unknown scenario kind {kind!r}")


# ---------------------------------------------------------------------------
# Solvers

def classic_fw(inst: FWInstance, T: int):
    """Standard Frank-Wolfe with step 2/(k+2), k counted from 0.

    The first step has weight 1 and lands on the first vertex, so the
    starting point only enters through the first gradient.  Returns a list
    of (t, iterate, f value) for t = 1..T.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    w = inst.y0.copy()
    rows = []
    for k in range(T):
        v = inst.set.lin_opt(inst.f.gradient(w))
        gamma = 2.0 / (k + 2.0)
        w = (1.0 - gamma) * w + gamma * v
        rows.append((k + 1, w.copy(), float(inst.f.value(w))))
    return rows


def fw_as_game(inst: FWInstance, T: int) -> GameTrace:
    """FTL against BestResponse with linear weights.

    The running weighted average of the second player's moves reproduces
    the classic FW trajectory exactly.
    """
    payoff = fw_game_payoff(inst)
    x0 = inst.f.gradient(inst.y0)
    config = GameConfig(
        payoff=payoff,
        learner_x=FTLPlayer(payoff, x0),
        learner_y=BestResponsePlayer(payoff, "y"),
        schedule=WeightSchedule.linear(),
        T=T,
    )
    return run_game(config)


class CountingSet:
    """Delegating wrapper that counts linear-oracle calls."""

    def __init__(self, inner):
        self._inner = inner
        self.lin_opt_calls = 0

    def lin_opt(self, c):
        self.lin_opt_calls += 1
        return self._inner.lin_opt(c)

    def __getattr__(self, name):
        return getattr(self._inner, name)


class GaugeBTRLPlayer:
    """Prescient gauge-regularized leader on the linear y-side losses.

    Acting at round t minimizes sum_{s<=t} a_s <x_s, y> + gauge(y)^2/eta,
    which the gauge reparameterization solves with one lin_opt call: the
    played point is rho_t * z_t with z_t on the boundary (when rho_t = 0
    the played point is the origin and z_t is discarded).
    """

    prescient = True

    def __init__(self, set_y, dim: int, eta: float, weight_fn):
        if eta <= 0:
            raise ValueError("eta must be positive")
        self.set = set_y
        self.eta = float(eta)
        self.weight_fn = weight_fn
        self.cumulative = np.zeros(dim)
        self.rhos: list = []

    def act(self, t, opponent=None):
        a_t = float(self.weight_fn(t))
        L = self.cumulative + a_t * np.asarray(opponent, dtype=float)
        y, rho, _ = gauge_ftrl_minimizer(self.set, L, self.eta)
        self.rhos.append(rho)
        return y

    def observe(self, t, alpha, opponent, grad=None):
        self.cumulative = self.cumulative + alpha * np.asarray(opponent, dtype=float)


def accelerated_eta(inst: FWInstance) -> float:
    """The step parameter beta / (16 L (1 + L/sigma)) from the proof."""
    if inst.f.sigma <= 0:
        raise UnsupportedOperationError("accelerated variant needs a strongly convex objective")
    beta = inst.set.beta
    if beta <= 0:
        raise UnsupportedOperationError("accelerated variant needs a beta-Gauge set")
    L = inst.f.L
    return beta / (16.0 * L * (1.0 + L / inst.f.sigma))


@dataclass
class NewFWResult:
    rows: list  # (t, y_t, ybar_t, f(ybar_t))
    trace: GameTrace
    lin_opt_calls: int
    eta: float


def new_fw(inst: FWInstance, T: int, eta: Optional[float] = None) -> NewFWResult:
    """The accelerated projection-free solver.

    Per round: linear weights a_t = t; the first player plays optimistic
    FTL, realized as grad f of the y-average with the last point's weight
    doubled up by the incoming round; the second player plays the gauge-
    regularized prescient leader, one linear-oracle call per round.  The
    output is the weighted average ybar_T.
    """
    if eta is None:
        eta = accelerated_eta(inst)
    else:
        accelerated_eta(inst)  # still validates curvature requirements
        if eta <= 0:
            raise ValueError("eta must be positive")
    payoff = fw_game_payoff(inst)
    counter = CountingSet(inst.set)
    x0 = inst.f.gradient(inst.y0)
    weight_fn = float
    config = GameConfig(
        payoff=payoff,
        learner_x=OptimisticFTLPlayer(payoff, x0, weight_fn),
        learner_y=GaugeBTRLPlayer(counter, inst.dim, eta, weight_fn),
        schedule=WeightSchedule.linear(),
        T=T,
    )
    trace = run_game(config)
    ybars = trace.running_y_averages()
    fvals = inst.f.value(ybars)
    rows = [(t + 1, trace.ys[t], ybars[t], float(fvals[t])) for t in range(T)]
    return NewFWResult(rows=rows, trace=trace, lin_opt_calls=counter.lin_opt_calls, eta=eta)


@dataclass
class LinearRateResult:
    rows: list  # (t, ybar_t, f(ybar_t))
    trace: GameTrace


def linear_rate_fw(inst: FWInstance, T: int, floor: float = 1e-60) -> LinearRateResult:
    """Adaptive FTL against BestResponse on a strongly convex set.

    Weights are the inverse squared gradient norms of the first player's
    losses.  Requires gradients of f bounded away from zero on the set
    (instance-declared B, spot-checked on a sample); an interior optimum
    makes B = 0 and is rejected up front.  The floor guards only genuine
    degeneracy: the loss gradients themselves shrink exponentially on
    valid instances, which is the mechanism of the linear rate.
    """
    if inst.set.lam <= 0:
        raise UnsupportedOperationError("linear-rate variant needs a strongly convex set")
    B = inst.constants.B
    if B <= 0:
        raise DegenerateGradientError(
            "gradient lower bound B is zero: the optimum is interior, the "
            "linear-rate assumptions do not hold"
        )
    rng = np.random.Generator(np.random.Philox(key=0))
    sample = inst.set.sample_dim(rng, 32, inst.dim)
    norms = np.linalg.norm(inst.f.gradient(sample), axis=1)
    if norms.min() < B - 1e-9:
        raise ValueError("declared gradient bound B is inconsistent with the instance")
    payoff = fw_game_payoff(inst)
    x0 = inst.f.gradient(inst.y0)
    config = GameConfig(
        payoff=payoff,
        learner_x=FTLPlayer(payoff, x0),
        learner_y=BestResponsePlayer(payoff, "y"),
        schedule=WeightSchedule.adaptive_inv_grad_sq(floor=floor),
        T=T,
    )
    trace = run_game(config)
    ybars = trace.running_y_averages()
    fvals = inst.f.value(ybars)
    rows = [(t + 1, ybars[t], float(fvals[t])) for t in range(T)]
    return LinearRateResult(rows=rows, trace=trace)


def sc_adagrad_game(payoff: GamePayoff, T: int, x0=None, floor: float = 1e-10) -> GameTrace:
    """Linear-rate equilibrium computation for curved payoffs.

    The first player runs strongly-convex adaptive gradient descent on the
    weighted losses (theta_t = alpha_t sigma_x), the second plays best
    response, and the weights are the inverse squared gradient norms.
    """
    if payoff.constants.sigma_x <= 0:
        raise UnsupportedOperationError("SC-AdaGrad game needs sigma_x > 0")
    if payoff.set_x is None:
        raise ValueError("payoff must carry the x-side constraint set")
    from .game_engine import SCAdaGradPlayer

    if x0 is None:
        x0 = np.zeros(payoff.dim_x)
    config = GameConfig(
        payoff=payoff,
        learner_x=SCAdaGradPlayer(payoff.set_x, x0, payoff.constants.sigma_x),
        learner_y=BestResponsePlayer(payoff, "y"),
        schedule=WeightSchedule.adaptive_inv_grad_sq(floor=floor),
        T=T,
    )
    return run_game(config)
