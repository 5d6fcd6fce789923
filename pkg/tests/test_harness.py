import os

import numpy as np
import pytest

from fwgame.cli import main as cli_main
from fwgame.core import UnsupportedOperationError
from fwgame.fw import bilinear_box_payoff, fw_as_game, fw_game_payoff, quadratic_instance
from fwgame.harness import (
    EXPONENTIAL,
    POWER_LAW,
    ROUND_HEADER,
    ExperimentConfig,
    brute_force_gap,
    fit_rate,
    grid_min_gauge_objective,
    make_rng,
    parse_config_file,
    parse_t_list,
    read_csv,
    run_preset,
    trace_round_rows,
    write_csv,
)
from fwgame.learners import gauge_ftrl_minimizer
from fwgame.game_engine import equilibrium_gap
from fwgame.sets import Box, L2Ball, LpBall


class TestFitRate:
    def test_inverse_square_series(self):
        series = [(T, 1.0 / T**2) for T in (10, 100, 1000)]
        fit = fit_rate(series, POWER_LAW)
        assert fit.slope_or_decay == pytest.approx(-2.0, abs=1e-9)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_exponential_series(self):
        series = [(T, np.exp(-0.1 * T)) for T in (10, 50, 90, 130)]
        fit = fit_rate(series, EXPONENTIAL)
        assert fit.slope_or_decay == pytest.approx(-0.1, abs=1e-9)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_constant_series(self):
        fit = fit_rate([(10, 0.5), (100, 0.5), (1000, 0.5)], POWER_LAW)
        assert fit.slope_or_decay == pytest.approx(0.0, abs=1e-12)

    def test_floor_filtering(self):
        series = [(10, 1e-2), (20, 1e-4), (30, 1e-6), (40, 1e-13), (50, 0.0)]
        fit = fit_rate(series, EXPONENTIAL)
        assert fit.points_used == 3

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            fit_rate([(10, 1.0), (20, 0.5)], POWER_LAW)
        with pytest.raises(ValueError):
            fit_rate([(10, 1e-15), (20, 1e-15), (30, 1e-15)], POWER_LAW)

    def test_unknown_model(self):
        with pytest.raises(ValueError):
            fit_rate([(1, 1.0), (2, 1.0), (3, 1.0)], "loglog")


class TestBruteForceGap:
    def setup_method(self):
        box = Box(-np.ones(1), np.ones(1))
        self.bilinear = bilinear_box_payoff([[1.0]], box, box, v_star=0.0)

    def test_saddle_point(self):
        assert brute_force_gap(self.bilinear, np.zeros(1), np.zeros(1), 101) == 0.0

    def test_hand_value(self):
        gap = brute_force_gap(self.bilinear, np.array([1.0]), np.array([0.0]), 101)
        assert gap == pytest.approx(1.0, abs=0.02)

    def test_agrees_with_oracle_gap(self):
        rng = np.random.default_rng(0)
        c = rng.standard_normal(2)
        c *= 0.6 / np.linalg.norm(c)
        inst = quadratic_instance(c, L2Ball(1.0), y0=[1.0, 0.0])
        payoff = fw_game_payoff(inst)
        point = inst.set.sample_dim(rng, 1, 2)[0]
        x_pt = inst.f.gradient(point)
        exact = equilibrium_gap(payoff, x_pt, point)
        brute = brute_force_gap(payoff, x_pt, point, 2001)
        assert abs(exact - brute) <= 5e-3

    def test_resolution_cap(self):
        with pytest.raises(ValueError):
            brute_force_gap(self.bilinear, np.zeros(1), np.zeros(1), 5001)

    def test_high_dims_unsupported(self):
        inst = quadratic_instance(np.zeros(3), L2Ball(1.0), y0=np.zeros(3))
        payoff = fw_game_payoff(inst)
        with pytest.raises(UnsupportedOperationError):
            brute_force_gap(payoff, np.zeros(3), np.zeros(3), 101)


def test_grid_min_gauge_objective_matches_closed_form():
    set_ = LpBall(1.5, 1.0)
    L = np.array([0.8, -0.6])
    x, _, _ = gauge_ftrl_minimizer(set_, L, 1.0)
    closed = float(L @ x) + set_.gauge(x) ** 2
    assert abs(closed - grid_min_gauge_objective(set_, L, 1.0)) <= 2e-3


class TestTListParsing:
    def test_plain_list(self):
        assert parse_t_list("8,16,24") == [8, 16, 24]

    def test_geometric_ellipsis(self):
        assert parse_t_list("64,128,...,4096") == [64, 128, 256, 512, 1024, 2048, 4096]

    def test_arithmetic_ellipsis(self):
        assert parse_t_list("10,20,...,60") == [10, 20, 30, 40, 50, 60]

    def test_bad_ellipsis(self):
        with pytest.raises(ValueError):
            parse_t_list("...,64")


class TestExperimentConfig:
    def test_t_list_must_increase(self):
        with pytest.raises(ValueError):
            ExperimentConfig(preset="set-lemmas", T_list=[10, 10])

    def test_tolerance_override(self):
        cfg = ExperimentConfig(preset="set-lemmas", tolerances={"identity": 1e-6})
        assert cfg.tol("identity", 1e-9) == 1e-6
        assert cfg.tol("other", 0.5) == 0.5


def test_parse_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# comment\npreset = set-lemmas\nseed = 3  # inline\ndims=2\n")
    cfg = parse_config_file(str(path))
    assert cfg == {"preset": "set-lemmas", "seed": "3", "dims": "2"}
    bad = tmp_path / "bad.cfg"
    bad.write_text("preset set-lemmas\n")
    with pytest.raises(ValueError):
        parse_config_file(str(bad))


class TestCSV:
    def test_round_trip_precision(self, tmp_path):
        inst = quadratic_instance([0.3, -0.4], L2Ball(1.0), y0=[1.0, 0.0])
        payoff = fw_game_payoff(inst)
        trace = fw_as_game(inst, 12)
        rows = trace_round_rows("t", 0, 12, trace, payoff)
        path = str(tmp_path / "rounds.csv")
        write_csv(path, ROUND_HEADER, rows)
        header, parsed = read_csv(path)
        assert header == ROUND_HEADER.split(",")
        for row, back in zip(rows, parsed):
            assert float(back[4]) == float(row[4])  # alphas round-trip exactly
            assert abs(float(back[5]) - float(row[5])) <= 1e-12 * max(1.0, abs(float(row[5])))

    def test_byte_identical_reruns(self, tmp_path):
        cfg = dict(preset="fw-equivalence", seed=7, dims=2)
        paths = []
        for run in ("a", "b"):
            out = str(tmp_path / run)
            code = run_preset(ExperimentConfig(T_list=[32], output_path=out, **cfg))
            assert code == 0
            paths.append(os.path.join(out, "fw-equivalence_rounds.csv"))
        with open(paths[0], "rb") as fa, open(paths[1], "rb") as fb:
            assert fa.read() == fb.read()


class TestCLI:
    def test_unknown_preset_exit_code(self, capsys, tmp_path):
        code = cli_main(["run", "--preset", "nope", "--out", str(tmp_path)])
        assert code == 1
        out = capsys.readouterr().out
        assert "available presets" in out

    def test_list_presets(self, capsys):
        assert cli_main(["list-presets"]) == 0
        out = capsys.readouterr().out
        assert "fw-equivalence" in out and "set-lemmas" in out

    def test_run_with_config_file_and_flag_override(self, tmp_path, capsys):
        cfgfile = tmp_path / "exp.cfg"
        cfgfile.write_text("preset = fw-equivalence\nseed = 1\ndims = 3\nT = 16\n")
        code = cli_main(["run", "--preset", "fw-equivalence", "--config", str(cfgfile),
                         "--seed", "2", "--out", str(tmp_path / "o")])
        assert code == 0
        out = capsys.readouterr().out
        assert "seed 2" in out  # the flag wins over the config file

    def test_verify_single_preset(self, tmp_path, capsys):
        code = cli_main(["verify", "--preset", "gauge-ftrl-oracle",
                         "--out", str(tmp_path / "v")])
        assert code == 0


def test_make_rng_deterministic():
    a = make_rng(5, 1).standard_normal(4)
    b = make_rng(5, 1).standard_normal(4)
    c = make_rng(5, 2).standard_normal(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
