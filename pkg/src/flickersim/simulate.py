"""Seeded stochastic trajectory generation for the coupled system.

Innovations come from Philox, a counter-based generator, so replicate k of a
run draws from an independent substream derived from (master seed, k) and
ensembles are reproducible regardless of execution order or worker count.
The state recurrence itself is evaluated with exactly the same floating
point expressions as the scalar step functions in
:mod:`flickersim.dynamics`, batched across replicates; a replay through
``step_coupled`` reproduces any trajectory bit for bit.

Given one environment path, adaptation paths for many adaptive capacities
can be recovered cheaply because the adapted state is a one-way exponential
filter of x; see :func:`adaptation_paths`.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, replace

import numpy as np
from scipy.signal import lfilter

from .dynamics import AdaptationParams, EcoParams, NoiseParams
from .equilibria import equilibria
from .wellbeing import SPECIALIST, CaseProfile, average_payoff, average_utility

DEFAULT_T_MAX = 50_000
DEFAULT_BURN_IN = 5_000
DEFAULT_SEED = 42


@dataclass(frozen=True)
class SimConfig:
    """Everything needed to reproduce one stochastic run.

    x0/y0 of None mean "start at the preferred equilibrium for eco": the
    high-biomass stable state when it exists, otherwise the collapsed one
    (and y0 defaults to x0).  Use :func:`resolve_config` to materialize
    them.
    """

    eco: EcoParams = EcoParams()
    noise: NoiseParams = NoiseParams()
    adapt: AdaptationParams = AdaptationParams()
    wellbeing: CaseProfile = SPECIALIST
    t_max: int = DEFAULT_T_MAX
    burn_in: int = DEFAULT_BURN_IN
    x0: float | None = None
    y0: float | None = None
    i0: float = 0.0
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if not self.burn_in >= 0:
            raise ValueError(f"sim.burn_in must be >= 0, got {self.burn_in}")
        if not self.t_max > self.burn_in:
            raise ValueError(
                f"sim.t_max must exceed burn_in, got t_max={self.t_max} burn_in={self.burn_in}"
            )
        if self.x0 is not None and not self.x0 >= 0:
            raise ValueError(f"sim.x0 must be >= 0, got {self.x0}")
        if self.y0 is not None and not self.y0 >= 0:
            raise ValueError(f"sim.y0 must be >= 0, got {self.y0}")


@dataclass(frozen=True)
class Trajectory:
    """Post-burn-in state series; sample k is time step t0 + k."""

    xs: np.ndarray
    ys: np.ndarray
    noise: np.ndarray
    t0: int
    fingerprint: str

    def __len__(self) -> int:
        return self.xs.size


@dataclass(frozen=True)
class EnsembleSummary:
    """Per-replicate trajectory averages and their cross-seed spread."""

    avg_payoffs: np.ndarray
    avg_utilities: np.ndarray
    mean_payoff: float
    mean_utility: float
    stderr_payoff: float
    stderr_utility: float


def default_initial_state(eco: EcoParams) -> float:
    """The preferred starting environment: the highest stable equilibrium."""
    stable = [e.x_star for e in equilibria(eco) if e.stable and e.x_star > 0]
    if not stable:
        raise ValueError(f"no stable positive equilibrium for {eco}; set x0 explicitly")
    return max(stable)


def resolve_config(cfg: SimConfig) -> SimConfig:
    """Fill x0/y0 defaults so every run parameter is explicit."""
    x0 = cfg.x0 if cfg.x0 is not None else default_initial_state(cfg.eco)
    y0 = cfg.y0 if cfg.y0 is not None else x0
    return replace(cfg, x0=x0, y0=y0)


def config_fingerprint(cfg: SimConfig) -> str:
    """Hash of the fully resolved configuration (sha256 hex, 16 chars).

    Changes iff any configuration value changes.
    """
    payload = json.dumps(asdict(resolve_config(cfg)), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def innovation_stream(seed: int, replicate: int = 0) -> np.random.Generator:
    """Independent counter-based stream for one replicate of a run."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(replicate,))
    return np.random.Generator(np.random.Philox(ss))


def _simulate_paths(
    eco: EcoParams,
    noise: NoiseParams,
    adapt: AdaptationParams,
    x0: float,
    y0: float,
    i0: float,
    etas: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Batched synchronous recurrence; row j consumes innovation row j.

    Expressions mirror growth_increment / step_environment / step_noise /
    step_adaptation exactly so that scalar replay is bit-identical.
    """
    n, t_max = etas.shape
    X = np.empty((n, t_max))
    I = np.empty((n, t_max))
    Y = np.empty((n, t_max))
    x = np.full(n, float(x0))
    i = np.full(n, float(i0))
    y = np.full(n, float(y0))
    r, K, c, h = eco.r, eco.K, eco.c, eco.h
    phi = 1.0 - 1.0 / noise.T
    l = adapt.l
    for t in range(t_max):
        X[:, t] = x
        I[:, t] = i
        Y[:, t] = y
        x_new = np.maximum(0.0, (r * x * (1.0 - x / K) - c * x * x / (x * x + h * h)) + (1.0 + i) * x)
        i = phi * i + etas[:, t]
        y = l * (x - y) + y
        x = x_new
    return X, I, Y


def _draw_innovations(cfg: SimConfig, replicates: range) -> np.ndarray:
    return np.stack(
        [
            innovation_stream(cfg.seed, k).normal(cfg.noise.mu, cfg.noise.beta, size=cfg.t_max)
            for k in replicates
        ]
    )


def run_trajectory(cfg: SimConfig, replicate: int = 0) -> Trajectory:
    """Simulate one trajectory and discard the burn-in prefix.

    Identical (cfg, replicate) gives a bit-identical result.  The first
    retained sample is time step burn_in.
    """
    rcfg = resolve_config(cfg)
    etas = _draw_innovations(rcfg, range(replicate, replicate + 1))
    X, I, Y = _simulate_paths(rcfg.eco, rcfg.noise, rcfg.adapt, rcfg.x0, rcfg.y0, rcfg.i0, etas)
    keep = slice(rcfg.burn_in, rcfg.t_max)
    return Trajectory(
        xs=X[0, keep].copy(),
        ys=Y[0, keep].copy(),
        noise=I[0, keep].copy(),
        t0=rcfg.burn_in,
        fingerprint=config_fingerprint(rcfg),
    )


def stderr_of_mean(values: np.ndarray) -> float:
    """Cross-replicate standard error; 0 for a single replicate."""
    values = np.asarray(values, dtype=float)
    if values.size <= 1:
        return 0.0
    return float(values.std(ddof=1) / np.sqrt(values.size))


def run_ensemble(cfg: SimConfig, n_seeds: int) -> EnsembleSummary:
    """Trajectory averages over n_seeds independent replicates.

    Replicate k draws its innovations from the (seed, k) substream, so the
    summary does not depend on evaluation order; replicate 0 reproduces
    run_trajectory(cfg) exactly.
    """
    if n_seeds < 1:
        raise ValueError(f"n_seeds must be >= 1, got {n_seeds}")
    rcfg = resolve_config(cfg)
    etas = _draw_innovations(rcfg, range(n_seeds))
    X, _, Y = _simulate_paths(rcfg.eco, rcfg.noise, rcfg.adapt, rcfg.x0, rcfg.y0, rcfg.i0, etas)
    keep = slice(rcfg.burn_in, rcfg.t_max)
    w = rcfg.wellbeing.params
    pays = np.array([average_payoff(X[j, keep], w) for j in range(n_seeds)])
    utils = np.array([average_utility(X[j, keep], Y[j, keep], w) for j in range(n_seeds)])
    return EnsembleSummary(
        avg_payoffs=pays,
        avg_utilities=utils,
        mean_payoff=float(pays.mean()),
        mean_utility=float(utils.mean()),
        stderr_payoff=stderr_of_mean(pays),
        stderr_utility=stderr_of_mean(utils),
    )


def adaptation_paths(X: np.ndarray, y0: float, l: float) -> np.ndarray:
    """Adapted-state series for each row of X under adaptive capacity l.

    Evaluates y_{t+1} = l*x_t + (1-l)*y_t as an exponential filter (C speed),
    which matches iterating step_adaptation to rounding error.  Used to
    compare many l values against one shared environment path.
    """
    if not 0.0 <= l <= 1.0:
        raise ValueError(f"l must be within [0, 1], got {l}")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n, t_max = X.shape
    head = np.full((n, 1), float(y0))
    if t_max == 1:
        return head
    tail, _ = lfilter([l], [1.0, -(1.0 - l)], X[:, :-1], axis=1, zi=(1.0 - l) * head)
    return np.concatenate((head, tail), axis=1)
