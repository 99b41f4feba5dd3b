"""Named parameter bundles reproducing the standard analyses.

Each preset binds one analysis to a fixed parameter set and the shared
default seed, so rerunning a preset is reproducible out of the box:

    fig2          bifurcation scan across extraction rates
    fig4a-fig4d   single trajectories at c = 1, 1.95, 2.45, 3.1
    fig5          utility sweep over c for three adaptive capacities
    fig6          specialist-vs-generalist transformation comparison
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import AdaptationParams, EcoParams, NoiseParams
from .simulate import DEFAULT_SEED, SimConfig
from .wellbeing import GENERALIST, SPECIALIST, CaseProfile


@dataclass(frozen=True)
class ScanConfig:
    """Extraction-rate grid for a bifurcation scan."""

    eco: EcoParams
    c_min: float
    c_max: float
    n_steps: int = 400


@dataclass(frozen=True)
class SweepConfig:
    """Grid bundle for a utility sweep (c is taken from c_grid, not base.eco)."""

    base: SimConfig
    c_grid: tuple[float, ...]
    l_values: tuple[float, ...]
    n_seeds: int = 10


@dataclass(frozen=True)
class TransformConfig:
    """Grid bundle for the transformation comparison at one adaptive capacity."""

    base: SimConfig
    baseline_case: CaseProfile
    transform_case: CaseProfile
    c_grid: tuple[float, ...]
    l: float
    n_seeds: int = 10


def _trajectory_preset(c: float) -> SimConfig:
    return SimConfig(
        eco=EcoParams(r=1.0, K=10.0, c=c, h=1.0),
        noise=NoiseParams(T=30.0, beta=0.07, mu=0.0),
        adapt=AdaptationParams(l=0.01),
        wellbeing=SPECIALIST,
        seed=DEFAULT_SEED,
    )


_SWEEP_GRID = tuple(float(c) for c in np.linspace(0.25, 3.5, 40))

PRESETS: dict[str, ScanConfig | SimConfig | SweepConfig | TransformConfig] = {
    "fig2": ScanConfig(eco=EcoParams(r=1.0, K=10.0, c=1.0, h=1.0), c_min=1.0, c_max=3.5),
    "fig4a": _trajectory_preset(1.0),
    "fig4b": _trajectory_preset(1.95),
    "fig4c": _trajectory_preset(2.45),
    "fig4d": _trajectory_preset(3.1),
    "fig5": SweepConfig(
        base=_trajectory_preset(1.0),
        c_grid=_SWEEP_GRID,
        l_values=(0.001, 0.01, 0.1),
    ),
    "fig6": TransformConfig(
        base=_trajectory_preset(1.0),
        baseline_case=SPECIALIST,
        transform_case=GENERALIST,
        c_grid=_SWEEP_GRID,
        l=0.001,
    ),
}


def get_preset(name: str):
    try:
        return PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(PRESETS))
        raise KeyError(f"unknown preset {name!r}; known presets: {known}") from None
