"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Every tolerance is pinned here or inside the preset defaults; the presets
under src/fwgame/harness.py are the single source of the experiment
definitions, and this module drives them at the required scales.
"""

import time

import numpy as np
import pytest

from fwgame.game_engine import check_sandwich
from fwgame.harness import (
    GAME_PRESETS,
    PRESETS,
    ExperimentConfig,
    brute_force_gap,
    certificate_run,
)


def run_criterion(number, label, budget_s, fn):
    start = time.perf_counter()
    passed, detail = fn()
    elapsed = time.perf_counter() - start
    status = "PASS" if passed and elapsed < budget_s else "FAIL"
    print(f"ACCEPTANCE {number:2d} [{status}] {label}: {detail} "
          f"({elapsed:.2f}s / budget {budget_s:.0f}s)")
    assert passed, f"criterion {number} failed: {detail}"
    assert elapsed < budget_s, f"criterion {number} exceeded {budget_s}s ({elapsed:.2f}s)"


def run_preset_outcome(name, **cfg_kwargs):
    outcome = PRESETS[name](ExperimentConfig(preset=name, **cfg_kwargs))
    detail = "; ".join(line.strip() for line in outcome.summary
                       if "certificate" not in line)
    return outcome.passed, detail


def test_criterion_1_fw_equivalence():
    run_criterion(
        1, "game trajectory equals classic FW (d=5, T=200, tol 1e-9)", 1.0,
        lambda: run_preset_outcome("fw-equivalence", dims=5, T_list=[200]),
    )


def test_criterion_2_certificate_and_brute_force():
    def body():
        worst_slack = -np.inf
        worst_bf = 0.0
        for name in GAME_PRESETS:
            for seed in range(50):
                trace, payoff = certificate_run(name, seed)
                eps = (trace.regret_x + trace.regret_y) / trace.A_T
                worst_slack = max(worst_slack, trace.gap - eps)
                if trace.gap > eps + 1e-7 or not check_sandwich(trace, payoff):
                    return False, f"certificate violated: {name} seed {seed}"
                bf = brute_force_gap(payoff, trace.x_bar, trace.y_bar, resolution=401)
                diff = abs(bf - trace.gap)
                worst_bf = max(worst_bf, diff)
                if diff > 5e-3:
                    return False, f"brute-force disagreement {diff:.2e}: {name} seed {seed}"
        return True, (f"6 presets x 50 seeds: worst gap-minus-bound "
                      f"{worst_slack:.2e} <= 1e-7, worst grid disagreement "
                      f"{worst_bf:.2e} <= 5e-3")

    run_criterion(2, "equilibrium-gap certificate + grid agreement", 30.0, body)


def test_criterion_3_vanilla_rate():
    run_criterion(
        3, "O(1/T) certificate decay, plain dynamics (slope in [-1.3,-0.85], r2>=0.98)",
        10.0, lambda: run_preset_outcome("vanilla-fw-rate"),
    )


def test_criterion_4_accelerated_rate():
    run_criterion(
        4, "O(1/T^2) gap decay, accelerated variant (slope<=-1.8, r2>=0.98, T oracle calls)",
        10.0, lambda: run_preset_outcome("new-fw-rate"),
    )


def test_criterion_5_linear_rate_fw():
    run_criterion(
        5, "linear rate, adaptive FTL variant (r2>=0.98, err@200<=1e-8)",
        5.0, lambda: run_preset_outcome("linear-fw-rate"),
    )


def test_criterion_6_linear_rate_game():
    run_criterion(
        6, "linear rate, curved game (gap@300<=1e-6, exp fit r2>=0.95)",
        5.0, lambda: run_preset_outcome("scadagrad-game-rate"),
    )


def test_criterion_7_regret_bounds():
    run_criterion(
        7, "regret-bound suite (4 bounds x 20 streams, slack 1e-6)",
        10.0, lambda: run_preset_outcome("regret-bounds"),
    )


def test_criterion_8_set_lemmas():
    run_criterion(
        8, "set-lemma suite (gauge identities, curvature, Lipschitz responses)",
        10.0, lambda: run_preset_outcome("set-lemmas"),
    )


def test_criterion_9_gauge_ftrl_oracle():
    run_criterion(
        9, "gauge step vs 1e-3 grid oracle (50 vectors/set, value diff <= 2e-3)",
        5.0, lambda: run_preset_outcome("gauge-ftrl-oracle"),
    )


def test_criterion_10_strongly_convex_br():
    run_criterion(
        10, "plain dynamics on strongly convex set with B>0 (slope <= -1.7)",
        10.0, lambda: run_preset_outcome("strongly-convex-br"),
    )
