"""Equilibria of convex-concave games via weighted no-regret dynamics,
with projection-free Frank-Wolfe instantiations and a verification harness."""

from .core import (
    DegenerateGradientError,
    GameConstants,
    GamePayoff,
    GameTrace,
    SmoothObjective,
    UnsupportedOperationError,
    WeightSchedule,
    emit_weight,
    weighted_average,
)
from .sets import Box, ConvexSet, L2Ball, LpBall, strongly_convex_br_lipschitz_check
from .game_engine import (
    GameConfig,
    check_sandwich,
    equilibrium_gap,
    run_game,
    weighted_regret,
)
from .fw import (
    FWInstance,
    classic_fw,
    fw_as_game,
    fw_game_payoff,
    linear_rate_fw,
    new_fw,
    quad_bilinear_payoff,
    quadratic_instance,
    sc_adagrad_game,
    scenario_payoff,
)

__version__ = "0.1.0"

__all__ = [
    "Box",
    "ConvexSet",
    "DegenerateGradientError",
    "FWInstance",
    "GameConfig",
    "GameConstants",
    "GamePayoff",
    "GameTrace",
    "L2Ball",
    "LpBall",
    "SmoothObjective",
    "UnsupportedOperationError",
    "WeightSchedule",
    "check_sandwich",
    "classic_fw",
    "emit_weight",
    "equilibrium_gap",
    "fw_as_game",
    "fw_game_payoff",
    "linear_rate_fw",
    "new_fw",
    "quad_bilinear_payoff",
    "quadratic_instance",
    "run_game",
    "sc_adagrad_game",
    "scenario_payoff",
    "strongly_convex_br_lipschitz_check",
    "weighted_average",
    "weighted_regret",
]
