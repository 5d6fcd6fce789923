"""Experiment harness: presets, CSV traces, rate fitting, brute-force oracles.

Each preset maps to one verification experiment.  run_preset executes it,
writes one per-round CSV (columns preset,seed,T,t,alpha,f_or_g_value,gap,
regret_x_partial,regret_y_partial) and one per-T summary CSV (columns
preset,seed,T,final_error,gap,regret_sum_over_AT), prints a summary with
fitted rates and pass/fail lines, and returns a process exit code:
0 pass, 1 error, 2 tolerance failure.

Randomness is driven by a counter-based generator (Philox) keyed on the
64-bit run seed plus a stream index; there is no global RNG state.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import (
    GamePayoff,
    UnsupportedOperationError,
    weighted_average,
)
from .fw import (
    classic_fw,
    fw_as_game,
    fw_game_payoff,
    linear_rate_fw,
    new_fw,
    quad_bilinear_payoff,
    quadratic_instance,
    sc_adagrad_game,
)
from .game_engine import check_sandwich, equilibrium_gap, partial_regrets
from .learners import (
    FTRL,
    FollowTheLeader,
    OptimisticFTRL,
    SCAdaGrad,
    gauge_ftrl_minimizer,
)
from .sets import Box, L2Ball, LpBall, strongly_convex_br_lipschitz_check

POWER_LAW = "power-law"
EXPONENTIAL = "exponential"
FIT_FLOOR = 1e-12


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator fully determined by (seed, stream)."""
    key = np.array([seed, stream], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


# ---------------------------------------------------------------------------
# Rate fitting

@dataclass(frozen=True)
class RateFit:
    model: str
    slope_or_decay: float
    intercept: float
    r_squared: float
    points_used: int


def fit_rate(series, model: str, floor: float = FIT_FLOOR) -> RateFit:
    """Least-squares fit of log(error) against log(T) or T.

    Points at or below the numerical floor are discarded so that flat
    machine-precision tails do not bias the slope; at least 3 usable
    points are required.
    """
    if model not in (POWER_LAW, EXPONENTIAL):
        raise ValueError(f"unknown fit model {model!r}")
    pts = [(float(T), float(e)) for T, e in series if e > floor]
    if len(pts) < 3:
        raise ValueError(f"rate fit needs >= 3 points above the {floor:g} floor, got {len(pts)}")
    Ts = np.array([p[0] for p in pts])
    errs = np.array([p[1] for p in pts])
    x = np.log(Ts) if model == POWER_LAW else Ts
    y = np.log(errs)
    A = np.column_stack([x, np.ones_like(x)])
    coef, _, _, _ = np.linalg.lstsq(A, y, rcond=None)
    pred = A @ coef
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum((y - pred) ** 2))
    r2 = 1.0 if ss_tot == 0.0 and ss_res < 1e-300 else 1.0 - ss_res / max(ss_tot, 1e-300)
    return RateFit(model=model, slope_or_decay=float(coef[0]), intercept=float(coef[1]),
                   r_squared=float(min(max(r2, 0.0), 1.0)), points_used=len(pts))


# ---------------------------------------------------------------------------
# Brute-force verification oracles

def brute_force_gap(payoff: GamePayoff, x_bar, y_bar, resolution: int = 201) -> float:
    """Grid evaluation of sup_y g(x_bar, y) - inf_x g(x, y_bar).

    Agrees with the oracle-based gap up to O(grid spacing * Lipschitz
    constant).  Only available where the payoff provides grids (dims <= 2).
    """
    if resolution > 2001:
        raise ValueError("resolution cap is 2001")
    if payoff.x_grid is None or payoff.y_grid is None:
        raise UnsupportedOperationError("brute-force grids need dims <= 2")
    Y = payoff.y_grid(resolution)
    X = payoff.x_grid(resolution)
    sup_side = float(np.max(payoff.g(np.asarray(x_bar, dtype=float), Y)))
    inf_side = float(np.min(payoff.g(X, np.asarray(y_bar, dtype=float))))
    return max(sup_side - inf_side, 0.0)


def grid_min_gauge_objective(set_, cumulative, eta: float, step: float = 1e-3) -> float:
    """Brute-force minimum of eta*<L, x> + gauge(x)^2 over a 2-D set.

    Parameterizes x = rho * z(theta) with z on the boundary and minimizes
    over a (theta, rho) product grid of the given step.  Along each theta
    the objective is a strictly convex parabola in rho, so its grid
    minimum sits at a grid point bracketing the vertex; evaluating those
    brackets (plus the endpoints) yields the exact product-grid minimum
    without materializing the grid.
    """
    cumulative = np.asarray(cumulative, dtype=float)
    if cumulative.size != 2:
        raise UnsupportedOperationError("grid oracle is 2-D only")
    thetas = np.arange(0.0, 2.0 * np.pi, step)
    dirs = np.column_stack([np.cos(thetas), np.sin(thetas)])
    norms = np.sum(np.abs(dirs) ** set_.p, axis=1) ** (1.0 / set_.p)
    boundary = set_.r * dirs / norms[:, None]
    lin = eta * (boundary @ cumulative)
    n = int(round(1.0 / step))
    k = np.clip(np.floor(-0.5 * lin / step), 0, n - 1)
    best = np.inf
    for rho in (k * step, (k + 1) * step, np.zeros_like(lin), np.full_like(lin, n * step)):
        best = min(best, float(np.min(lin * rho + rho * rho)))
    return best


# ---------------------------------------------------------------------------
# Experiment configuration

@dataclass
class ExperimentConfig:
    preset: str
    T_list: Optional[list] = None
    seed: int = 0
    eta_multiplier: float = 1.0
    output_path: str = "out"
    dims: int = 5
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.T_list is not None:
            if any(int(t) < 1 for t in self.T_list):
                raise ValueError("T values must be positive")
            if any(b <= a for a, b in zip(self.T_list, self.T_list[1:])):
                raise ValueError("T_list must be strictly increasing")
            self.T_list = [int(t) for t in self.T_list]
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        if self.eta_multiplier <= 0:
            raise ValueError("eta multiplier must be positive")
        if self.dims < 1:
            raise ValueError("dims must be >= 1")

    def tol(self, name: str, default: float) -> float:
        return float(self.tolerances.get(name, default))


def parse_t_list(text: str) -> list:
    """Parse '64,128,...,4096' style lists; '...' continues the progression
    of the two preceding values (geometric when the ratio is integral,
    arithmetic otherwise)."""
    tokens = [t.strip() for t in text.split(",") if t.strip()]
    out: list = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok == "...":
            if len(out) < 2 or i + 1 >= len(tokens):
                raise ValueError("'...' needs two values before and one after")
            target = int(tokens[i + 1])
            a, b = out[-2], out[-1]
            fill = None
            if a > 0 and b % a == 0 and b // a >= 2:
                ratio = b // a
                geo, nxt = [], b * ratio
                while nxt < target:
                    geo.append(nxt)
                    nxt *= ratio
                if nxt == target:
                    fill = geo
            if fill is None:
                step = b - a
                if step <= 0 or (target - b) % step != 0:
                    raise ValueError("cannot infer progression for '...'")
                fill = list(range(b + step, target, step))
            out.extend(fill)
            out.append(target)
            i += 2
        else:
            out.append(int(tok))
            i += 1
    return out


def parse_config_file(path: str) -> dict:
    """Flat key = value lines; '#' starts a comment; values stay strings."""
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, val = line.split("=", 1)
            out[key.strip()] = val.strip()
    return out


# ---------------------------------------------------------------------------
# Preset outcomes and CSV emission

@dataclass
class PresetOutcome:
    name: str
    passed: bool
    summary: list
    round_rows: list  # (preset, seed, T, t, alpha, value, gap, rx_partial, ry_partial)
    t_rows: list      # (preset, seed, T, final_error, gap, regret_sum_over_AT)


ROUND_HEADER = "preset,seed,T,t,alpha,f_or_g_value,gap,regret_x_partial,regret_y_partial"
SUMMARY_HEADER = "preset,seed,T,final_error,gap,regret_sum_over_AT"


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def write_csv(path: str, header: str, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_csv(path: str):
    """Parse a harness CSV back into (header, list-of-tuples with floats)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        rows = []
        for line in fh:
            parts = line.strip().split(",")
            parsed = []
            for p in parts:
                try:
                    parsed.append(float(p))
                except ValueError:
                    parsed.append(p)
            rows.append(tuple(parsed))
    return header, rows


def trace_round_rows(name: str, seed: int, T: int, trace, payoff, values=None) -> list:
    """Per-round CSV rows for one run: running-average gap and prefix regrets."""
    xbars = trace.running_x_averages()
    ybars = trace.running_y_averages()
    rx, ry = partial_regrets(trace, payoff)
    if values is None:
        values = trace.losses_x
    rows = []
    for t in range(T):
        gap_t = equilibrium_gap(payoff, xbars[t], ybars[t])
        rows.append((name, seed, T, t + 1, trace.alphas[t], float(values[t]),
                     gap_t, rx[t], ry[t]))
    return rows


def certificate_line(tag, trace, payoff) -> tuple:
    ok = check_sandwich(trace, payoff)
    eps = (trace.regret_x + trace.regret_y) / trace.A_T
    return ok, f"  {tag}: gap={trace.gap:.3e} avg-regret-sum={eps:.3e} certificate={'OK' if ok else 'VIOLATED'}"


# ---------------------------------------------------------------------------
# Instance builders shared by presets and the certificate sweep

def _ball_instance(seed: int, dims: int, center_norm: float, radius: float,
                   scale: float = 1.0, stream: int = 0):
    rng = make_rng(seed, stream)
    c = rng.standard_normal(dims)
    c *= center_norm / np.linalg.norm(c)
    y0 = rng.standard_normal(dims)
    y0 *= radius / np.linalg.norm(y0)
    return quadratic_instance(c, L2Ball(radius), scale=scale, y0=y0)


def _box_instance(seed: int, dims: int, stream: int = 1):
    rng = make_rng(seed, stream)
    box = Box(-np.ones(dims), np.ones(dims))
    c = 0.8 * (2.0 * rng.random(dims) - 1.0)
    y0 = 2.0 * rng.random(dims) - 1.0
    return quadratic_instance(c, box, y0=y0)


def _scadagrad_payoff(seed: int, stream: int = 2):
    rng = make_rng(seed, stream)
    u = 0.8 * rng.standard_normal(2)
    v = 0.5 * rng.standard_normal(2)
    M = 6.0 * np.eye(2)
    return quad_bilinear_payoff(u, 1.0, M, v, 1.0, L2Ball(2.0), L2Ball(14.0))


# ---------------------------------------------------------------------------
# Presets

def _run_fw_equivalence(cfg: ExperimentConfig) -> PresetOutcome:
    """Trajectory identity between the game dynamics and classic FW."""
    T = max(cfg.T_list) if cfg.T_list else 200
    tol = cfg.tol("max_deviation", 1e-9)
    summary, t_rows, round_rows = [], [], []
    passed = True
    for tag, inst in (("ball", _ball_instance(cfg.seed, cfg.dims, 0.5, 1.0)),
                      ("box", _box_instance(cfg.seed, cfg.dims))):
        payoff = fw_game_payoff(inst)
        trace = fw_as_game(inst, T)
        classic = classic_fw(inst, T)
        ybars = trace.running_y_averages()
        dev = max(float(np.linalg.norm(ybars[t] - classic[t][1])) for t in range(T))
        ok_cert, line = certificate_line(f"{tag} T={T}", trace, payoff)
        verdict = "PASS" if dev <= tol else "FAIL"
        passed &= dev <= tol and ok_cert
        summary.append(f"  {tag}: max deviation {dev:.3e} <= {tol:g}: {verdict}")
        summary.append(line)
        eps = (trace.regret_x + trace.regret_y) / trace.A_T
        t_rows.append((cfg.preset, cfg.seed, T, dev, trace.gap, eps))
        if tag == "ball":
            fvals = inst.f.value(ybars)
            round_rows = trace_round_rows(cfg.preset, cfg.seed, T, trace, payoff, values=fvals)
    return PresetOutcome(cfg.preset, passed, summary, round_rows, t_rows)


def _rate_preset(cfg, inst, series_of, model, check, default_Ts, values_are_f=True):
    """Shared body of the rate presets: run over T_list, fit, check."""
    Ts = cfg.T_list or default_Ts
    payoff = fw_game_payoff(inst)
    summary, t_rows, round_rows = [], [], []
    series = []
    cert_ok = True
    for T in Ts:
        trace, extra = series_of(T)
        err = extra["error"]
        series.append((T, err))
        ok, line = certificate_line(f"T={T}", trace, payoff)
        cert_ok &= ok
        summary.append(line)
        eps = (trace.regret_x + trace.regret_y) / trace.A_T
        t_rows.append((cfg.preset, cfg.seed, T, err, trace.gap, eps))
        if T == Ts[-1]:
            vals = inst.f.value(trace.running_y_averages()) if values_are_f else None
            round_rows = trace_round_rows(cfg.preset, cfg.seed, T, trace, payoff, values=vals)
    fit = fit_rate(series, model)
    passed, lines = check(fit, series)
    summary.extend(lines)
    if not cert_ok:
        summary.append("  certificate VIOLATED on some run")
    return PresetOutcome(cfg.preset, passed and cert_ok, summary, round_rows, t_rows), fit


def _run_vanilla_fw_rate(cfg: ExperimentConfig) -> PresetOutcome:
    """O(1/T) certificate decay of FTL + BestResponse on an interior-optimum
    quadratic over a Euclidean ball."""
    inst = _ball_instance(cfg.seed, cfg.dims, 0.5, 1.0)

    def series_of(T):
        trace = fw_as_game(inst, T)
        eps = (trace.regret_x + trace.regret_y) / trace.A_T
        return trace, {"error": eps}

    lo = cfg.tol("slope_min", -1.3)
    hi = cfg.tol("slope_max", -0.85)
    r2min = cfg.tol("r_squared_min", 0.98)

    def check(fit, series):
        ok = lo <= fit.slope_or_decay <= hi and fit.r_squared >= r2min
        return ok, [
            f"  power-law fit of avg-regret-sum: slope {fit.slope_or_decay:.4f} "
            f"(window [{lo}, {hi}]), r^2 {fit.r_squared:.5f} (min {r2min}): "
            f"{'PASS' if ok else 'FAIL'}"
        ]

    outcome, _ = _rate_preset(cfg, inst, series_of, POWER_LAW, check,
                              [2 ** k for k in range(6, 13)])
    return outcome


def _run_new_fw_rate(cfg: ExperimentConfig) -> PresetOutcome:
    """O(1/T^2) equilibrium-gap decay of the accelerated variant, plus the
    single-oracle-call-per-round budget."""
    inst = _ball_instance(cfg.seed, cfg.dims, 1.0, 2.0)
    calls_ok = True

    def series_of(T):
        res = new_fw(inst, T, eta=None if cfg.eta_multiplier == 1.0
                     else cfg.eta_multiplier * _auto_eta(inst))
        nonlocal calls_ok
        calls_ok &= res.lin_opt_calls == T
        return res.trace, {"error": res.trace.gap}

    slope_max = cfg.tol("slope_max", -1.8)
    r2min = cfg.tol("r_squared_min", 0.98)

    # theoretical envelope constant, with the regularizer anchored at the
    # origin (the gauge minimizer): L * gauge(y*)^2 * (1 + L/sigma) / beta
    L, sig = inst.f.L, inst.f.sigma
    y_star = inst.set.project(inst.quad.c)
    envelope = L * inst.set.gauge(y_star) ** 2 * (1.0 + L / sig) / inst.set.beta

    def check(fit, series):
        ok = fit.slope_or_decay <= slope_max and fit.r_squared >= r2min and calls_ok
        return ok, [
            f"  power-law fit of equilibrium gap: slope {fit.slope_or_decay:.4f} "
            f"(max {slope_max}), r^2 {fit.r_squared:.5f} (min {r2min}): "
            f"{'PASS' if fit.slope_or_decay <= slope_max and fit.r_squared >= r2min else 'FAIL'}",
            f"  one lin_opt call per round: {'PASS' if calls_ok else 'FAIL'}",
            f"  theoretical envelope constant L*(R(y*)-R(0))*(1+L/sigma)/beta = {envelope:.3f}",
        ]

    outcome, _ = _rate_preset(cfg, inst, series_of, POWER_LAW, check,
                              [2 ** k for k in range(6, 13)])
    return outcome


def _auto_eta(inst):
    from .fw import accelerated_eta

    return accelerated_eta(inst)


def _run_linear_fw_rate(cfg: ExperimentConfig) -> PresetOutcome:
    """Linear convergence of adaptive FTL + BestResponse on a boundary-
    optimum instance with gradients bounded away from zero."""
    inst = _ball_instance(cfg.seed, cfg.dims, 1.5, 1.0)
    Ts = cfg.T_list or (list(range(2, 31, 2)) + [200])
    final_T = Ts[-1]
    summary, t_rows, round_rows = [], [], []
    payoff = fw_game_payoff(inst)
    series = []
    cert_ok = True
    final_err = None
    for T in Ts:
        res = linear_rate_fw(inst, T)
        err = res.rows[-1][2] - inst.f_min
        series.append((T, err))
        ok, line = certificate_line(f"T={T}", res.trace, payoff)
        cert_ok &= ok
        summary.append(line)
        eps = (res.trace.regret_x + res.trace.regret_y) / res.trace.A_T
        t_rows.append((cfg.preset, cfg.seed, T, err, res.trace.gap, eps))
        if T == final_T:
            final_err = err
            fvals = inst.f.value(res.trace.running_y_averages())
            round_rows = trace_round_rows(cfg.preset, cfg.seed, T, res.trace, payoff, values=fvals)
    fit = fit_rate(series, EXPONENTIAL)
    r2min = cfg.tol("r_squared_min", 0.98)
    err_max = cfg.tol("final_error_max", 1e-8)
    ok_fit = fit.slope_or_decay < 0 and fit.r_squared >= r2min
    ok_err = final_err <= err_max
    summary.append(
        f"  exponential fit (pre-floor): decay {fit.slope_or_decay:.4f} < 0, "
        f"r^2 {fit.r_squared:.5f} (min {r2min}): {'PASS' if ok_fit else 'FAIL'}")
    summary.append(
        f"  final error at T={final_T}: {final_err:.3e} <= {err_max:g}: "
        f"{'PASS' if ok_err else 'FAIL'}")
    summary.append(f"  declared gradient lower bound B = {inst.constants.B:.3f}")
    return PresetOutcome(cfg.preset, ok_fit and ok_err and cert_ok, summary, round_rows, t_rows)


def _run_scadagrad_game_rate(cfg: ExperimentConfig) -> PresetOutcome:
    """Linear equilibrium-gap decay for the curved quadratic-bilinear game."""
    payoff = _scadagrad_payoff(cfg.seed)
    Ts = cfg.T_list or list(range(30, 301, 30))
    summary, t_rows, round_rows = [], [], []
    series = []
    cert_ok = True
    for T in Ts:
        trace = sc_adagrad_game(payoff, T, x0=np.zeros(2))
        series.append((T, trace.gap))
        ok, line = certificate_line(f"T={T}", trace, payoff)
        cert_ok &= ok
        summary.append(line)
        eps = (trace.regret_x + trace.regret_y) / trace.A_T
        t_rows.append((cfg.preset, cfg.seed, T, trace.gap, trace.gap, eps))
        if T == Ts[-1]:
            round_rows = trace_round_rows(cfg.preset, cfg.seed, T, trace, payoff)
            final_gap = trace.gap
    fit = fit_rate(series, EXPONENTIAL)
    gap_max = cfg.tol("final_gap_max", 1e-6)
    r2min = cfg.tol("r_squared_min", 0.95)
    ok_gap = final_gap <= gap_max
    ok_fit = fit.slope_or_decay < 0 and fit.r_squared >= r2min
    summary.append(
        f"  exponential fit of gap: decay {fit.slope_or_decay:.4f} < 0, "
        f"r^2 {fit.r_squared:.5f} (min {r2min}): {'PASS' if ok_fit else 'FAIL'}")
    summary.append(
        f"  gap at T={Ts[-1]}: {final_gap:.3e} <= {gap_max:g}: {'PASS' if ok_gap else 'FAIL'}")
    summary.append(f"  envelope-argmin-interior flag: {payoff.s_argmin_interior}")
    return PresetOutcome(cfg.preset, ok_gap and ok_fit and cert_ok, summary, round_rows, t_rows)


def _run_strongly_convex_br(cfg: ExperimentConfig) -> PresetOutcome:
    """Fast certificate decay of plain FTL + BestResponse on a strongly
    convex set with gradients bounded away from zero."""
    inst = _ball_instance(cfg.seed, cfg.dims, 1.5, 1.0)

    def series_of(T):
        trace = fw_as_game(inst, T)
        eps = (trace.regret_x + trace.regret_y) / trace.A_T
        return trace, {"error": eps}

    slope_max = cfg.tol("slope_max", -1.7)

    def check(fit, series):
        ok = fit.slope_or_decay <= slope_max
        return ok, [
            f"  power-law fit of avg-regret-sum: slope {fit.slope_or_decay:.4f} "
            f"(max {slope_max}), r^2 {fit.r_squared:.5f}: {'PASS' if ok else 'FAIL'}",
            f"  declared gradient lower bound B = {inst.constants.B:.3f}",
        ]

    outcome, _ = _rate_preset(cfg, inst, series_of, POWER_LAW, check,
                              [2 ** k for k in range(6, 13)])
    return outcome


def _run_gauge_ftrl_oracle(cfg: ExperimentConfig) -> PresetOutcome:
    """Closed-form gauge step against the dense grid minimization."""
    tol = cfg.tol("value_diff_max", 2e-3)
    rng = make_rng(cfg.seed, 10)
    summary, t_rows = [], []
    passed = True
    worst = 0.0
    for set_ in (L2Ball(1.0), LpBall(1.5, 1.0)):
        diffs = []
        for _ in range(50):
            L = rng.standard_normal(2) * rng.uniform(0.2, 1.5)
            eta = rng.uniform(0.3, 1.5)
            x, rho, _ = gauge_ftrl_minimizer(set_, L, eta)
            closed = eta * float(L @ x) + set_.gauge(x) ** 2
            grid = grid_min_gauge_objective(set_, L, eta)
            diffs.append(abs(closed - grid))
        d = max(diffs)
        worst = max(worst, d)
        ok = d <= tol
        passed &= ok
        summary.append(f"  {set_!r}: max |closed - grid| value diff {d:.2e} <= {tol:g}: "
                       f"{'PASS' if ok else 'FAIL'}")
        t_rows.append((cfg.preset, cfg.seed, 0, d, 0.0, 0.0))
    return PresetOutcome(cfg.preset, passed, summary, [], t_rows)


def _run_regret_bounds(cfg: ExperimentConfig) -> PresetOutcome:
    """Measured regrets against the four closed-form regret bounds."""
    slack = cfg.tol("slack", 1e-6)
    streams = int(cfg.tol("streams", 20))
    rng = make_rng(cfg.seed, 11)
    summary, t_rows = [], []
    passed = True

    def report(tag, margins):
        nonlocal passed
        worst = max(margins)
        ok = worst <= slack
        passed &= ok
        summary.append(f"  {tag}: worst (measured - bound) = {worst:.3e} <= {slack:g}: "
                       f"{'PASS' if ok else 'FAIL'}")
        t_rows.append((cfg.preset, cfg.seed, 0, worst, 0.0, 0.0))

    d, T = 3, 40

    # follow-the-leader on strongly convex quadratics (two bound forms)
    margins = []
    for _ in range(streams):
        sigmas = rng.uniform(0.5, 2.0, size=T)
        centers = rng.uniform(-1.0, 1.0, size=(T, d))
        ftl = FollowTheLeader(lambda w, h: weighted_average(h, w), np.zeros(d))
        xs = []
        for t in range(T):
            xs.append(ftl.act())
            ftl.observe(sigmas[t], centers[t])
        xs = np.asarray(xs)
        losses = 0.5 * sigmas * np.sum((xs - centers) ** 2, axis=1)
        x_star = weighted_average(centers, sigmas)
        best = float(np.sum(0.5 * sigmas * np.sum((x_star - centers) ** 2, axis=1)))
        regret = float(losses.sum()) - best
        grads = sigmas[:, None] * (xs - centers)
        gnorms = np.linalg.norm(grads, axis=1)
        bound1 = 0.5 * float(np.sum(gnorms ** 2 / np.cumsum(sigmas)))
        bound2 = (gnorms.max() ** 2 / (2.0 * sigmas.min())) * (np.log(T) + 1.0)
        margins.append(max(regret - bound1, regret - bound2))
    report("FTL strongly-convex bounds", margins)

    # follow-the-regularized-leader on linear losses over the unit ball
    margins = []
    set_ = L2Ball(1.0)
    for _ in range(streams):
        eta = rng.uniform(0.1, 1.0)
        losses = rng.uniform(-1.0, 1.0, size=(T, d))
        learner = FTRL(set_, d, eta)
        xs = []
        for t in range(T):
            xs.append(learner.act())
            learner.observe(1.0, losses[t])
        xs = np.asarray(xs)
        total = losses.sum(axis=0)
        best = -float(np.linalg.norm(total))  # lin-opt over the unit ball
        regret = float(np.sum(xs * losses)) - best
        D = 1.0  # sup of ||x||^2 over the unit ball
        bound = D / eta + 0.5 * eta * float(np.sum(np.linalg.norm(losses, axis=1) ** 2))
        margins.append(regret - bound)
    report("FTRL linear-loss bound", margins)

    # optimistic variant with arbitrary hints (beta = 2 for the squared norm)
    margins = []
    for _ in range(streams):
        eta = rng.uniform(0.1, 0.8)
        losses = rng.uniform(-1.0, 1.0, size=(T, d))
        hints = np.zeros((T, d))
        hints[1:] = losses[:-1] + rng.normal(0.0, 0.3, size=(T - 1, d))
        learner = OptimisticFTRL(set_, d, eta)
        ys = []
        for t in range(T):
            ys.append(learner.act(hint=hints[t]))
            learner.observe(1.0, losses[t])
        ys = np.asarray(ys)
        total = losses.sum(axis=0)
        y_star = set_.lin_opt(total)
        regret = float(np.sum(ys * losses)) - float(total @ y_star)
        r_span = float(y_star @ y_star)  # R(y*) - R(argmin R) for R = ||.||^2
        bound = r_span / eta + (eta / 2.0) * float(np.sum(np.linalg.norm(losses - hints, axis=1) ** 2))
        margins.append(regret - bound)
    report("Optimistic-FTRL bound", margins)

    # adaptive projected gradient descent on strongly convex quadratics
    margins = []
    set2 = L2Ball(2.0)
    for _ in range(streams):
        thetas = rng.uniform(0.5, 2.0, size=T)
        centers = rng.uniform(-1.0, 1.0, size=(T, d))
        learner = SCAdaGrad(set2, np.zeros(d))
        xs, etas = [], []
        for t in range(T):
            x = learner.current.copy()
            xs.append(x)
            grad = thetas[t] * (x - centers[t])
            learner.step(grad, thetas[t])
            etas.append(1.0 / learner.theta_sum)
        xs = np.asarray(xs)
        losses = 0.5 * thetas * np.sum((xs - centers) ** 2, axis=1)
        x_star = set2.project(weighted_average(centers, thetas))
        best = float(np.sum(0.5 * thetas * np.sum((x_star - centers) ** 2, axis=1)))
        regret = float(losses.sum()) - best
        grads = thetas[:, None] * (xs - centers)
        bound = 0.5 * float(np.sum(np.asarray(etas) * np.sum(grads ** 2, axis=1)))
        margins.append(regret - bound)
    report("SC-AdaGrad logarithmic bound", margins)

    return PresetOutcome(cfg.preset, passed, summary, [], t_rows)


def _run_set_lemmas(cfg: ExperimentConfig) -> PresetOutcome:
    """Gauge identities, squared-gauge curvature, support-point Lipschitz
    bound, and the supremum-of-strongly-convex midpoint property."""
    rng = make_rng(cfg.seed, 12)
    summary, t_rows = [], []
    passed = True

    def report(tag, worst, tol):
        nonlocal passed
        ok = worst <= tol
        passed &= ok
        summary.append(f"  {tag}: worst violation {worst:.2e} <= {tol:g}: "
                       f"{'PASS' if ok else 'FAIL'}")
        t_rows.append((cfg.preset, cfg.seed, 0, worst, 0.0, 0.0))

    tol_ident = cfg.tol("identity", 1e-9)
    sets = (L2Ball(1.3), LpBall(1.5, 1.0), LpBall(1.8, 2.0))
    worst = 0.0
    for set_ in sets:
        for _ in range(40):
            x = rng.standard_normal(2) * rng.uniform(0.1, 2.0)
            rho = rng.uniform(0.0, 3.0)
            worst = max(worst, abs(set_.gauge(rho * x) - rho * set_.gauge(x)))
            b = x / max(set_.gauge(x), 1e-12)
            worst = max(worst, abs(set_.gauge(b) - 1.0))
            inside = set_.gauge(x) <= 1.0
            if inside != set_.contains(x, tol=0.0):
                worst = max(worst, 1.0)
    report("gauge homogeneity / boundary / membership", worst, tol_ident)

    tol_beta = cfg.tol("beta_gauge", 1e-8)
    worst = 0.0
    for set_ in (LpBall(1.5, 1.0), LpBall(1.2, 0.7), L2Ball(2.0)):
        for _ in range(200):
            a = rng.standard_normal(2) * rng.uniform(0.1, 1.5)
            b = rng.standard_normal(2) * rng.uniform(0.1, 1.5)
            mid = 0.5 * (a + b)
            lp = float(np.sum(np.abs(a - b) ** set_.p) ** (1.0 / set_.p))
            lhs = set_.gauge(mid) ** 2
            rhs = 0.5 * set_.gauge(a) ** 2 + 0.5 * set_.gauge(b) ** 2 - set_.beta / 8.0 * lp ** 2
            worst = max(worst, lhs - rhs)
    report("squared-gauge curvature midpoint inequality", worst, tol_beta)

    violations = 0
    for set_ in (L2Ball(1.0), LpBall(1.5, 1.0)):
        for _ in range(500):
            p = rng.standard_normal(2)
            q = rng.standard_normal(2)
            if np.linalg.norm(p) < 1e-9 or np.linalg.norm(q) < 1e-9:
                continue
            if not strongly_convex_br_lipschitz_check(set_, p, q):
                violations += 1
    report("support-point Lipschitz bound (violations)", float(violations), 0.5)

    tol_sup = cfg.tol("sup_strong_convexity", 1e-6)
    sigma_x = 0.8
    M = np.array([[1.0, 0.4], [-0.3, 1.2]])
    ygrid = L2Ball(1.0).sample_dim(make_rng(cfg.seed, 13), 400, 2)

    def s_grid(x):
        vals = 0.5 * sigma_x * float(x @ x) + (x @ M) @ ygrid.T - 0.5 * np.sum(ygrid ** 2, axis=1)
        return float(vals.max())

    worst = 0.0
    for _ in range(100):
        w = rng.standard_normal(2)
        z = rng.standard_normal(2)
        lhs = s_grid(0.5 * (w + z))
        rhs = 0.5 * s_grid(w) + 0.5 * s_grid(z) - sigma_x / 8.0 * float(np.sum((w - z) ** 2))
        worst = max(worst, lhs - rhs)
    report("supremum-of-strongly-convex midpoint", worst, tol_sup)

    return PresetOutcome(cfg.preset, passed, summary, [], t_rows)


PRESETS: dict = {
    "fw-equivalence": _run_fw_equivalence,
    "vanilla-fw-rate": _run_vanilla_fw_rate,
    "new-fw-rate": _run_new_fw_rate,
    "linear-fw-rate": _run_linear_fw_rate,
    "scadagrad-game-rate": _run_scadagrad_game_rate,
    "gauge-ftrl-oracle": _run_gauge_ftrl_oracle,
    "regret-bounds": _run_regret_bounds,
    "set-lemmas": _run_set_lemmas,
    "strongly-convex-br": _run_strongly_convex_br,
}


def certificate_run(name: str, seed: int):
    """One small seeded 2-D run of a game preset, for certificate sweeps.

    Returns (trace, payoff).  Raises KeyError for presets without runs.
    """
    if name == "fw-equivalence":
        inst = _ball_instance(seed, 2, 0.6, 1.0, stream=20)
        return fw_as_game(inst, 64), fw_game_payoff(inst)
    if name == "vanilla-fw-rate":
        inst = _ball_instance(seed, 2, 0.5, 1.0, stream=21)
        return fw_as_game(inst, 64), fw_game_payoff(inst)
    if name == "new-fw-rate":
        inst = _ball_instance(seed, 2, 1.0, 2.0, stream=22)
        res = new_fw(inst, 64)
        return res.trace, fw_game_payoff(inst)
    if name == "linear-fw-rate":
        inst = _ball_instance(seed, 2, 1.5, 1.0, stream=23)
        res = linear_rate_fw(inst, 40)
        return res.trace, fw_game_payoff(inst)
    if name == "scadagrad-game-rate":
        payoff = _scadagrad_payoff(seed)
        return sc_adagrad_game(payoff, 60, x0=np.zeros(2)), payoff
    if name == "strongly-convex-br":
        inst = _ball_instance(seed, 2, 1.5, 1.0, stream=24)
        return fw_as_game(inst, 64), fw_game_payoff(inst)
    raise KeyError(f"preset {name!r} has no game runs")

GAME_PRESETS = ("fw-equivalence", "vanilla-fw-rate", "new-fw-rate",
                "linear-fw-rate", "scadagrad-game-rate", "strongly-convex-br")


def run_preset(cfg: ExperimentConfig) -> int:
    """Execute a preset, write CSVs, print the summary.  Exit-code semantics:
    0 pass, 1 error (including unknown preset), 2 tolerance failure."""
    fn = PRESETS.get(cfg.preset)
    if fn is None:
        print(f"error: unknown preset {cfg.preset!r}")
        print("available presets: " + ", ".join(sorted(PRESETS)))
        return 1
    try:
        outcome = fn(cfg)
        os.makedirs(cfg.output_path, exist_ok=True)
        rounds_path = os.path.join(cfg.output_path, f"{cfg.preset}_rounds.csv")
        summary_path = os.path.join(cfg.output_path, f"{cfg.preset}_summary.csv")
        write_csv(rounds_path, ROUND_HEADER, outcome.round_rows)
        write_csv(summary_path, SUMMARY_HEADER, outcome.t_rows)
    except OSError as exc:
        print(f"error: {exc}")
        return 1
    print(f"preset {cfg.preset} (seed {cfg.seed})")
    for line in outcome.summary:
        print(line)
    print(f"result: {'PASS' if outcome.passed else 'FAIL'}")
    print(f"wrote {rounds_path} and {summary_path}")
    return 0 if outcome.passed else 2
