import numpy as np
import pytest

from fwgame.core import DegenerateGradientError, GameConstants, GamePayoff, WeightSchedule
from fwgame.fw import (
    bilinear_box_payoff,
    classic_fw,
    fw_as_game,
    fw_game_payoff,
    quadratic_instance,
)
from fwgame.game_engine import (
    BestResponsePlayer,
    FTLPlayer,
    GameConfig,
    check_sandwich,
    equilibrium_gap,
    run_game,
    weighted_regret,
)
from fwgame.sets import Box, L2Ball


def make_fw_setup(seed=0, dims=3, center_norm=0.5, radius=1.0):
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(dims)
    c *= center_norm / np.linalg.norm(c)
    y0 = rng.standard_normal(dims)
    y0 *= radius / np.linalg.norm(y0)
    inst = quadratic_instance(c, L2Ball(radius), y0=y0)
    return inst, fw_game_payoff(inst)


def ftl_vs_br_config(inst, payoff, T):
    return GameConfig(
        payoff=payoff,
        learner_x=FTLPlayer(payoff, inst.f.gradient(inst.y0)),
        learner_y=BestResponsePlayer(payoff, "y"),
        schedule=WeightSchedule.linear(),
        T=T,
    )


class TestRunGame:
    def test_single_round_outputs_first_moves(self):
        inst, payoff = make_fw_setup()
        trace = run_game(ftl_vs_br_config(inst, payoff, 1))
        assert np.allclose(trace.x_bar, trace.xs[0])
        assert np.allclose(trace.y_bar, trace.ys[0])

    def test_trace_bookkeeping(self):
        box = Box(-np.ones(2), np.ones(2))
        payoff = bilinear_box_payoff(np.eye(2), box, box, v_star=0.0)
        config = GameConfig(
            payoff=payoff,
            learner_x=FTLPlayer(payoff, np.array([0.5, -0.5])),
            learner_y=BestResponsePlayer(payoff, "y"),
            schedule=WeightSchedule.uniform(),
            T=9,
        )
        trace = run_game(config)
        assert trace.T == 9
        assert len(trace.xs) == len(trace.ys) == len(trace.alphas) == 9
        assert len(trace.losses_x) == len(trace.losses_y) == 9
        assert np.allclose(trace.losses_x, -trace.losses_y)
        # stored aggregates reproduce from the sequences
        assert trace.A_T == pytest.approx(trace.alphas.sum(), rel=1e-12)
        recomputed = (trace.alphas[:, None] * trace.xs).sum(axis=0) / trace.A_T
        assert np.allclose(trace.x_bar, recomputed, rtol=1e-12, atol=1e-15)
        recomputed_y = (trace.alphas[:, None] * trace.ys).sum(axis=0) / trace.A_T
        assert np.allclose(trace.y_bar, recomputed_y, rtol=1e-12, atol=1e-15)
        assert trace.gap >= 0.0

    def test_matches_classic_fw_trajectory(self):
        inst, payoff = make_fw_setup(seed=3, dims=4)
        T = 100
        trace = run_game(ftl_vs_br_config(inst, payoff, T))
        classic = classic_fw(inst, T)
        ybars = trace.running_y_averages()
        dev = max(np.linalg.norm(ybars[t] - classic[t][1]) for t in range(T))
        assert dev <= 1e-9

    def test_determinism_bit_identical(self):
        inst, payoff = make_fw_setup(seed=4)
        t1 = run_game(ftl_vs_br_config(inst, payoff, 32))
        t2 = run_game(ftl_vs_br_config(inst, payoff, 32))
        assert np.array_equal(t1.xs, t2.xs)
        assert np.array_equal(t1.ys, t2.ys)
        assert np.array_equal(t1.alphas, t2.alphas)
        assert t1.gap == t2.gap and t1.regret_x == t2.regret_x

    def test_prescience_isolation(self):
        # x-iterates up to round t only depend on rounds before t
        inst, payoff = make_fw_setup(seed=5)
        full = run_game(ftl_vs_br_config(inst, payoff, 40))
        short = run_game(ftl_vs_br_config(inst, payoff, 25))
        assert np.array_equal(full.xs[:25], short.xs)
        assert np.array_equal(full.ys[:25], short.ys)

    def test_adaptive_weights_recompute(self):
        inst, payoff = make_fw_setup(seed=6, center_norm=1.5)
        config = GameConfig(
            payoff=payoff,
            learner_x=FTLPlayer(payoff, inst.f.gradient(inst.y0)),
            learner_y=BestResponsePlayer(payoff, "y"),
            schedule=WeightSchedule.adaptive_inv_grad_sq(floor=1e-60),
            T=30,
        )
        trace = run_game(config)
        for t in range(30):
            g = payoff.grad_x(trace.xs[t], trace.ys[t])
            assert trace.alphas[t] == pytest.approx(1.0 / float(g @ g), rel=1e-12)

    def test_learner_error_carries_round_index(self):
        inst, payoff = make_fw_setup(seed=7)
        # loss gradients live inside the ball, so a floor above its diameter
        # must trip the degenerate-gradient guard
        config = GameConfig(
            payoff=payoff,
            learner_x=FTLPlayer(payoff, inst.f.gradient(inst.y0)),
            learner_y=BestResponsePlayer(payoff, "y"),
            schedule=WeightSchedule.adaptive_inv_grad_sq(floor=10.0),
            T=50,
        )
        with pytest.raises(DegenerateGradientError) as excinfo:
            run_game(config)
        notes = getattr(excinfo.value, "__notes__", [])
        attached = " ".join(notes) + " " + str(excinfo.value)
        assert "round" in attached


class TestEquilibriumGap:
    def setup_method(self):
        box = Box(-np.ones(1), np.ones(1))
        self.payoff = bilinear_box_payoff([[1.0]], box, box, v_star=0.0)

    def test_exact_saddle(self):
        assert equilibrium_gap(self.payoff, np.zeros(1), np.zeros(1)) == 0.0

    def test_hand_value(self):
        gap = equilibrium_gap(self.payoff, np.array([1.0]), np.array([0.0]))
        assert gap == pytest.approx(1.0)

    def test_fw_conjugate_identity(self):
        # for g = f*(x) - <x,y> the inf over x at ybar equals -f(ybar)
        inst = quadratic_instance([0.0, 0.0], L2Ball(1.0), y0=[1.0, 0.0])
        payoff = fw_game_payoff(inst)
        gap = equilibrium_gap(payoff, np.zeros(2), np.zeros(2))
        assert gap == pytest.approx(0.0, abs=1e-12)

    def test_defective_oracle_detected(self):
        bad = GamePayoff(
            g=lambda x, y: np.sum(np.asarray(x) * np.asarray(y), axis=-1),
            grad_x=lambda x, y: np.asarray(y, dtype=float),
            grad_y=lambda x, y: np.asarray(x, dtype=float),
            best_response_x=lambda y: np.ones(1),   # not a minimizer
            best_response_y=lambda x: -np.ones(1),  # not a maximizer
            argmin_weighted_x=lambda w, ys: np.zeros(1),
            constants=GameConstants(L=1.0),
        )
        with pytest.raises(RuntimeError):
            equilibrium_gap(bad, np.array([1.0]), np.array([1.0]))


class TestWeightedRegret:
    def test_prescient_side_nonpositive(self):
        inst, payoff = make_fw_setup(seed=8)
        trace = run_game(ftl_vs_br_config(inst, payoff, 50))
        assert trace.regret_y <= 1e-9 * trace.A_T

    def test_single_round_comparator_zero(self):
        inst, payoff = make_fw_setup(seed=9)
        trace = run_game(ftl_vs_br_config(inst, payoff, 1))
        # with one round, FTL's comparator is the best response to y_1;
        # the played x_1 is grad f(y0), so regret is nonnegative and small
        assert trace.regret_x >= -1e-12

    def test_matches_independent_recomputation(self):
        inst, payoff = make_fw_setup(seed=10, dims=4)
        trace = run_game(ftl_vs_br_config(inst, payoff, 100))
        # recompute both regrets directly from stored sequences
        a, xs, ys = trace.alphas, trace.xs, trace.ys
        x_star = inst.f.gradient((a[:, None] * ys).sum(axis=0) / a.sum())
        rx = sum(
            float(a[t]) * (float(payoff.g(xs[t], ys[t])) - float(payoff.g(x_star, ys[t])))
            for t in range(100)
        )
        assert rx == pytest.approx(trace.regret_x, abs=1e-10)
        w = (a[:, None] * xs).sum(axis=0)
        y_star = inst.set.lin_opt(w)
        ry = sum(
            float(a[t]) * (float(payoff.g(xs[t], y_star)) - float(payoff.g(xs[t], ys[t])))
            for t in range(100)
        )
        assert ry == pytest.approx(trace.regret_y, abs=1e-10)


class TestSandwich:
    def test_bilinear_symmetric(self):
        box = Box(-np.ones(2), np.ones(2))
        payoff = bilinear_box_payoff(np.eye(2), box, box, v_star=0.0)
        config = GameConfig(
            payoff=payoff,
            learner_x=FTLPlayer(payoff, np.array([0.3, -0.3])),
            learner_y=BestResponsePlayer(payoff, "y"),
            schedule=WeightSchedule.uniform(),
            T=40,
        )
        trace = run_game(config)
        assert check_sandwich(trace, payoff)

    def test_fw_game_with_known_value(self):
        inst, payoff = make_fw_setup(seed=11)
        assert payoff.v_star == pytest.approx(-inst.f_min)
        trace = run_game(ftl_vs_br_config(inst, payoff, 60))
        assert check_sandwich(trace, payoff)

    def test_certificate_over_seeds(self):
        for seed in range(10):
            inst, payoff = make_fw_setup(seed=seed, center_norm=float(0.3 + 0.1 * seed))
            trace = run_game(ftl_vs_br_config(inst, payoff, 48))
            eps = (trace.regret_x + trace.regret_y) / trace.A_T
            assert trace.gap <= eps + 1e-7
            assert check_sandwich(trace, payoff)
