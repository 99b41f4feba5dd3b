"""Flickering statistics, utility sweeps, and transformation comparison.

Basin membership is judged against the separatrix (the unstable interior
equilibrium).  Sweeps over extraction rate reuse one set of environment
paths per grid point across all adaptive capacities and both wellbeing
profiles: adaptation never feeds back on the environment, so comparisons
are made on literally shared noise.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .dynamics import AdaptationParams, EcoParams
from .equilibria import Regime, classify_regime, equilibria
from .simulate import (
    SimConfig,
    _draw_innovations,
    _simulate_paths,
    adaptation_paths,
    resolve_config,
    stderr_of_mean,
)
from .wellbeing import CaseProfile, payoff, utility

DEFAULT_MIN_DWELL = 5


class Basin(Enum):
    HIGH = "high"
    LOW = "low"


@dataclass(frozen=True)
class FlickerStats:
    """Debounced basin bookkeeping for one trajectory.

    residence_high/low list dwell durations in chronological order; their
    total equals the trajectory length, and n_transitions is one less than
    the number of dwells.
    """

    n_transitions: int
    residence_high: tuple[int, ...]
    residence_low: tuple[int, ...]
    fraction_high: float


@dataclass(frozen=True)
class SweepRow:
    """Ensemble averages for one (extraction rate, adaptive capacity) cell."""

    c: float
    l: float
    regime: Regime | None
    avg_payoff: float
    avg_utility: float
    stderr_payoff: float
    stderr_utility: float
    error: str | None = None


@dataclass(frozen=True)
class ComparisonRow:
    """Both wellbeing profiles evaluated on shared trajectories at one c.

    The x_digest fields hash the exact environment series each profile was
    scored on; equal digests certify the shared-noise comparison.
    """

    c: float
    regime: Regime | None
    mean_x: float
    avg_payoff_baseline: float
    stderr_payoff_baseline: float
    avg_payoff_transform: float
    stderr_payoff_transform: float
    avg_utility_baseline: float
    stderr_utility_baseline: float
    avg_utility_transform: float
    stderr_utility_transform: float
    x_digest_baseline: str = ""
    x_digest_transform: str = ""
    error: str | None = None


@dataclass(frozen=True)
class CrossoverReport:
    """Where the generalist profile starts to beat the specialist one.

    c_cross_perfect uses the perfect-adaptation payoff curves, and
    c_cross_adaptive the simulated utility curves; each is None when the
    curves do not cross inside the grid.  The band fields give the c-range
    over which the two curves' 2-stderr confidence bands overlap around the
    crossing.
    """

    c_cross_perfect: float | None
    regime_perfect: Regime | None
    c_cross_adaptive: float | None
    regime_adaptive: Regime | None
    band_perfect: tuple[float, float] | None
    band_adaptive: tuple[float, float] | None
    rows: tuple[ComparisonRow, ...]


def classify_basin(x: float, separatrix: float) -> Basin:
    """High if x >= separatrix else Low (ties count as High)."""
    if not separatrix > 0:
        raise ValueError(f"separatrix must be > 0, got {separatrix}")
    return Basin.HIGH if x >= separatrix else Basin.LOW


def separatrix_for(eco: EcoParams) -> float:
    """The unstable interior equilibrium dividing the two basins.

    Only defined in the bistable regime; raises ValueError elsewhere.
    """
    interior = [e for e in equilibria(eco) if e.x_star > 0 and not e.stable]
    if len(interior) != 1:
        raise ValueError(
            f"no unique unstable interior equilibrium at c={eco.c}; "
            "supply an explicit basin threshold"
        )
    return interior[0].x_star


def flicker_stats(xs, separatrix: float, min_dwell: int = DEFAULT_MIN_DWELL) -> FlickerStats:
    """Count debounced basin switches and dwell times along a series.

    A switch is accepted only if the new basin persists at least min_dwell
    steps; shorter excursions are absorbed into the surrounding dwell.
    min_dwell=1 disables debouncing.
    """
    xs = np.asarray(xs, dtype=float)
    if xs.size == 0:
        raise ValueError("empty trajectory")
    if not separatrix > 0:
        raise ValueError(f"separatrix must be > 0, got {separatrix}")
    if min_dwell < 1:
        raise ValueError(f"min_dwell must be >= 1, got {min_dwell}")
    high = xs >= separatrix
    # raw run-length encoding
    bounds = np.flatnonzero(high[1:] != high[:-1]) + 1
    starts = np.concatenate(([0], bounds))
    lengths = np.diff(np.concatenate((starts, [high.size])))
    # debounce: absorb runs shorter than min_dwell into the current dwell
    basins = [bool(high[0])]
    dwells = [int(lengths[0])]
    for start, length in zip(starts[1:], lengths[1:]):
        if bool(high[start]) != basins[-1] and length >= min_dwell:
            basins.append(bool(high[start]))
            dwells.append(int(length))
        else:
            dwells[-1] += int(length)
    res_high = tuple(d for b, d in zip(basins, dwells) if b)
    res_low = tuple(d for b, d in zip(basins, dwells) if not b)
    return FlickerStats(
        n_transitions=len(dwells) - 1,
        residence_high=res_high,
        residence_low=res_low,
        fraction_high=sum(res_high) / xs.size,
    )


def _digest(arr: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(arr).tobytes()).hexdigest()[:16]


def _environment_block(base: SimConfig, c: float, n_seeds: int) -> tuple[SimConfig, np.ndarray]:
    """Resolved config and post-burn-in environment paths at extraction c."""
    cfg = resolve_config(replace(base, eco=replace(base.eco, c=c)))
    etas = _draw_innovations(cfg, range(n_seeds))
    X, _, _ = _simulate_paths(cfg.eco, cfg.noise, cfg.adapt, cfg.x0, cfg.y0, cfg.i0, etas)
    return cfg, X


def _sweep_cell(args) -> list[SweepRow]:
    base, c, l_values, n_seeds = args
    try:
        regime = classify_regime(replace(base.eco, c=c))
    except Exception as exc:  # recorded per cell, not fatal
        regime, regime_err = None, str(exc)
    else:
        regime_err = None
    try:
        cfg, X = _environment_block(base, c, n_seeds)
    except Exception as exc:
        return [
            SweepRow(c, l, regime, float("nan"), float("nan"), float("nan"), float("nan"), str(exc))
            for l in l_values
        ]
    keep = slice(cfg.burn_in, cfg.t_max)
    w = cfg.wellbeing.params
    pays = payoff(X[:, keep], w).mean(axis=1)
    rows = []
    for l in l_values:
        Y = adaptation_paths(X, cfg.y0, l)
        utils = utility(X[:, keep], Y[:, keep], w).mean(axis=1)
        rows.append(
            SweepRow(
                c=c,
                l=l,
                regime=regime,
                avg_payoff=float(pays.mean()),
                avg_utility=float(utils.mean()),
                stderr_payoff=stderr_of_mean(pays),
                stderr_utility=stderr_of_mean(utils),
                error=regime_err,
            )
        )
    return rows


def utility_sweep(
    base: SimConfig,
    c_grid,
    l_values,
    n_seeds: int,
    workers: int = 1,
) -> list[SweepRow]:
    """Ensemble payoff/utility averages over a (c, l) grid, ordered by (l, c).

    All l values at a given c are scored on the same environment paths
    (shared noise), and every c reuses the same replicate substreams, so
    cells are directly comparable.  Grid points may be computed in parallel;
    the row order and values do not depend on workers.
    """
    c_grid = [float(c) for c in c_grid]
    l_values = [float(l) for l in l_values]
    if not c_grid or not l_values:
        raise ValueError("c_grid and l_values must be nonempty")
    if n_seeds < 1:
        raise ValueError(f"n_seeds must be >= 1, got {n_seeds}")
    jobs = [(base, c, l_values, n_seeds) for c in c_grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_c = list(pool.map(_sweep_cell, jobs))
    else:
        per_c = [_sweep_cell(job) for job in jobs]
    rows = [row for cell in per_c for row in cell]
    rows.sort(key=lambda row: (row.l, row.c))
    return rows


def _case_scores(X: np.ndarray, Y: np.ndarray, case: CaseProfile):
    """Per-replicate payoff and utility averages plus the x-series digest."""
    pays = payoff(X, case.params).mean(axis=1)
    utils = utility(X, Y, case.params).mean(axis=1)
    return pays, utils, _digest(X)


def _first_upcrossing(cs: list[float], diffs: list[float], refine_to: float):
    """First grid index where diffs turns positive, refined on the interpolant.

    Returns (c_cross, index) or None when the difference never becomes
    positive after a non-positive value.
    """
    for k in range(1, len(cs)):
        if diffs[k - 1] <= 0.0 < diffs[k]:
            lo, hi = cs[k - 1], cs[k]
            d_lo, d_hi = diffs[k - 1], diffs[k]

            def interp(c):
                return d_lo + (d_hi - d_lo) * (c - lo) / (hi - lo)

            while hi - lo > refine_to:
                mid = 0.5 * (lo + hi)
                if interp(mid) <= 0.0:
                    lo = mid
                else:
                    hi = mid
            return 0.5 * (lo + hi), k
    return None


def _overlap_band(cs, diffs, spreads, k_cross) -> tuple[float, float] | None:
    """Contiguous c-interval around the crossing where the 2-stderr bands overlap."""
    overlap = [abs(d) <= 2.0 * s for d, s in zip(diffs, spreads)]
    k = k_cross if overlap[k_cross] else k_cross - 1
    if not overlap[k]:
        return None
    lo = k
    while lo > 0 and overlap[lo - 1]:
        lo -= 1
    hi = k
    while hi < len(cs) - 1 and overlap[hi + 1]:
        hi += 1
    return (cs[lo], cs[hi])


def _regime_at(eco: EcoParams, c: float) -> Regime | None:
    try:
        return classify_regime(replace(eco, c=c))
    except Exception:
        return None


def transform_comparison(
    base: SimConfig,
    baseline_case: CaseProfile,
    transform_case: CaseProfile,
    c_grid,
    l: float,
    n_seeds: int,
) -> CrossoverReport:
    """Compare staying specialist against transforming, across extraction rates.

    Per grid point the two profiles are scored on identical trajectories:
    perfect-adaptation average payoff and simulated average utility under
    adaptive capacity l.  The first grid crossings (transform rising above
    baseline) are refined on the interpolated ensemble means to one tenth
    of the grid step.
    """
    c_grid = [float(c) for c in c_grid]
    if not c_grid:
        raise ValueError("c_grid must be nonempty")
    if n_seeds < 1:
        raise ValueError(f"n_seeds must be >= 1, got {n_seeds}")
    base = replace(base, adapt=AdaptationParams(l=float(l)))
    rows = []
    for c in c_grid:
        regime = _regime_at(base.eco, c)
        try:
            cfg, X = _environment_block(base, c, n_seeds)
        except Exception as exc:
            nan = float("nan")
            rows.append(
                ComparisonRow(c, regime, nan, nan, nan, nan, nan, nan, nan, nan, nan,
                              error=str(exc))
            )
            continue
        keep = slice(cfg.burn_in, cfg.t_max)
        Y = adaptation_paths(X, cfg.y0, l)
        Xk, Yk = X[:, keep], Y[:, keep]
        pays_b, utils_b, digest_b = _case_scores(Xk, Yk, baseline_case)
        pays_t, utils_t, digest_t = _case_scores(Xk, Yk, transform_case)
        rows.append(
            ComparisonRow(
                c=c,
                regime=regime,
                mean_x=float(Xk.mean()),
                avg_payoff_baseline=float(pays_b.mean()),
                stderr_payoff_baseline=stderr_of_mean(pays_b),
                avg_payoff_transform=float(pays_t.mean()),
                stderr_payoff_transform=stderr_of_mean(pays_t),
                avg_utility_baseline=float(utils_b.mean()),
                stderr_utility_baseline=stderr_of_mean(utils_b),
                avg_utility_transform=float(utils_t.mean()),
                stderr_utility_transform=stderr_of_mean(utils_t),
                x_digest_baseline=digest_b,
                x_digest_transform=digest_t,
            )
        )

    ok = [row for row in rows if row.error is None]
    cs = [row.c for row in ok]
    step = min(b - a for a, b in zip(cs, cs[1:])) if len(cs) > 1 else 1.0
    refine_to = step / 10.0

    def locate(diffs, spreads):
        hit = _first_upcrossing(cs, diffs, refine_to)
        if hit is None:
            return None, None, None
        c_cross, k = hit
        return c_cross, _regime_at(base.eco, c_cross), _overlap_band(cs, diffs, spreads, k)

    d_pay = [row.avg_payoff_transform - row.avg_payoff_baseline for row in ok]
    s_pay = [
        np.hypot(row.stderr_payoff_transform, row.stderr_payoff_baseline) for row in ok
    ]
    d_util = [row.avg_utility_transform - row.avg_utility_baseline for row in ok]
    s_util = [
        np.hypot(row.stderr_utility_transform, row.stderr_utility_baseline) for row in ok
    ]
    c_perfect, regime_perfect, band_perfect = locate(d_pay, s_pay)
    c_adaptive, regime_adaptive, band_adaptive = locate(d_util, s_util)
    return CrossoverReport(
        c_cross_perfect=c_perfect,
        regime_perfect=regime_perfect,
        c_cross_adaptive=c_adaptive,
        regime_adaptive=regime_adaptive,
        band_perfect=band_perfect,
        band_adaptive=band_adaptive,
        rows=tuple(rows),
    )
