"""Fixed points, stability, regime classification, and fold location.

With the noise level held at zero the environment map has fixed points at
x = 0 and wherever growth balances harvest.  The nonzero fixed points are
the positive roots of the cubic

    r * (1 - x/K) * (x^2 + h^2) - c * x = 0,

so there are one, two (exactly at a fold), or three of them.  For low
extraction only a high-biomass state is stable, for high extraction only a
collapsed state, and in between the map is bistable with an unstable
separatrix between the two attractors.  Roots are located by bracketing on
a grid over [0, 2K] and refined by bisection; stability uses the discrete
map derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import IntEnum

import numpy as np

from .dynamics import EcoParams, growth_increment

# Bisection stops when the bracket is narrower than this (in x or in c).
ROOT_TOL = 1e-12
# Grid points used to bracket sign changes on [0, 2K].  Fine enough to
# separate root pairs until c is within ~1e-8 of a fold.
BRACKET_GRID = 4096
# Residual |f(x*) - x*| above which a refined root is rejected.
RESIDUAL_TOL = 1e-9


class EquilibriumError(RuntimeError):
    """Root finding failed; the parameters are outside the supported regime."""


class RegimeError(RuntimeError):
    """The stable/unstable equilibrium pattern fits none of the three regimes."""


class NoBistabilityError(RuntimeError):
    """No bistable extraction-rate interval inside the scanned range."""


class Regime(IntEnum):
    """Dynamical regime of the environment map at a given extraction rate."""

    SINGLE_HIGH = 1  # only the high-biomass state is stable
    BISTABLE = 2     # two stable states; flickering possible under noise
    SINGLE_LOW = 3   # only the collapsed state is stable


@dataclass(frozen=True)
class Equilibrium:
    """A fixed point of the zero-noise environment map.

    multiplier is the map derivative at the fixed point; the fixed point is
    stable iff |multiplier| < 1.
    """

    x_star: float
    stable: bool
    multiplier: float


@dataclass(frozen=True)
class FoldPoints:
    """Extraction rates bounding the bistable band: c_low < c < c_high."""

    c_low: float
    c_high: float


@dataclass(frozen=True)
class ScanRow:
    """Equilibria at one extraction rate of a bifurcation scan."""

    c: float
    equilibria: tuple[Equilibrium, ...]
    error: str | None = None


def map_multiplier(x: float, p: EcoParams) -> float:
    """Derivative of the one-step environment map at x (zero noise)."""
    h2 = p.h * p.h
    x2 = x * x
    return 1.0 + p.r - 2.0 * p.r * x / p.K - p.c * 2.0 * x * h2 / ((x2 + h2) * (x2 + h2))


def _balance(x: np.ndarray | float, p: EcoParams):
    """Growth/harvest balance whose positive zeros are the nonzero fixed points."""
    return p.r * (1.0 - x / p.K) * (x * x + p.h * p.h) - p.c * x


def _bisect_root(p: EcoParams, lo: float, hi: float) -> float:
    f_lo = _balance(lo, p)
    while hi - lo > ROOT_TOL:
        mid = 0.5 * (lo + hi)
        f_mid = _balance(mid, p)
        if f_mid == 0.0:
            return mid
        if (f_lo > 0) == (f_mid > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _positive_roots(p: EcoParams) -> list[float]:
    """All positive fixed points, bracketed on [0, 2K] and bisected to ROOT_TOL."""
    xs = np.linspace(0.0, 2.0 * p.K, BRACKET_GRID)
    vals = _balance(xs, p)
    sign = np.sign(vals)
    flips = np.flatnonzero(sign[:-1] * sign[1:] < 0)
    roots = [_bisect_root(p, xs[k], xs[k + 1]) for k in flips]
    roots.extend(float(x) for x in xs[1:][vals[1:] == 0.0])
    return sorted(roots)


def equilibria(p: EcoParams) -> list[Equilibrium]:
    """All nonnegative fixed points of the environment map, sorted ascending.

    x = 0 is always included (the trivial extinction equilibrium).  Raises
    EquilibriumError if the bracketing scan produces an impossible root
    count or a refined root fails the fixed-point residual check.
    """
    roots = _positive_roots(p)
    if not 1 <= len(roots) <= 3:
        raise EquilibriumError(
            f"found {len(roots)} positive fixed points for {p}; expected 1-3"
        )
    for x in roots:
        residual = abs(growth_increment(x, p))
        if residual >= RESIDUAL_TOL:
            raise EquilibriumError(
                f"root {x!r} has fixed-point residual {residual:.2e} for {p}"
            )
    out = []
    for x in [0.0] + roots:
        mult = float(map_multiplier(x, p))
        out.append(Equilibrium(x_star=float(x), stable=abs(mult) < 1.0, multiplier=mult))
    return out


def _cubic_turning_points(p: EcoParams) -> tuple[float, float] | None:
    """Turning points of the monic fixed-point cubic, or None if monotone.

    The positive fixed points solve x^3 - K x^2 + (h^2 + cK/r) x - K h^2 = 0;
    its derivative 3x^2 - 2Kx + (h^2 + cK/r) has real roots only while the
    fold structure exists.
    """
    b = p.h * p.h + p.c * p.K / p.r
    disc = p.K * p.K - 3.0 * b
    if disc <= 0:
        return None
    s = math.sqrt(disc)
    return ((p.K - s) / 3.0, (p.K + s) / 3.0)


def classify_regime(p: EcoParams) -> Regime:
    """Classify the extraction rate into one of the three regimes.

    Bistable means two stable positive equilibria separated by an unstable
    one.  A single stable positive equilibrium is assigned to the high or
    low branch by its position relative to the cubic's turning points (the
    fold skeleton); if the cubic is monotone there is no fold structure at
    all and the split falls back to K/2.
    """
    eqs = [e for e in equilibria(p) if e.x_star > 0]
    stable = [e for e in eqs if e.stable]
    if len(eqs) == 3 and len(stable) == 2 and not eqs[1].stable:
        return Regime.BISTABLE
    if len(eqs) == 1 and len(stable) == 1:
        x = stable[0].x_star
        turning = _cubic_turning_points(p)
        if turning is None:
            return Regime.SINGLE_HIGH if x > p.K / 2.0 else Regime.SINGLE_LOW
        lo, hi = turning
        if x >= hi:
            return Regime.SINGLE_HIGH
        if x <= lo:
            return Regime.SINGLE_LOW
        raise RegimeError(f"single equilibrium {x!r} lies between turning points for {p}")
    raise RegimeError(
        f"{len(stable)} stable / {len(eqs)} positive equilibria for {p}; "
        "outside the three-regime structure (fold point or cyclic dynamics?)"
    )


def bifurcation_scan(
    p_base: EcoParams, c_min: float, c_max: float, n_steps: int
) -> list[ScanRow]:
    """Equilibria with stability flags on a uniform extraction-rate grid.

    Per-grid-point failures are recorded in the row rather than raised.
    """
    if not (0 <= c_min < c_max):
        raise ValueError(f"need 0 <= c_min < c_max, got [{c_min}, {c_max}]")
    if n_steps < 2:
        raise ValueError(f"n_steps must be >= 2, got {n_steps}")
    rows = []
    for c in np.linspace(c_min, c_max, n_steps):
        p = replace(p_base, c=float(c))
        try:
            rows.append(ScanRow(c=float(c), equilibria=tuple(equilibria(p))))
        except EquilibriumError as exc:
            rows.append(ScanRow(c=float(c), equilibria=(), error=str(exc)))
    return rows


def _positive_root_count(p: EcoParams) -> int:
    xs = np.linspace(0.0, 2.0 * p.K, BRACKET_GRID)
    vals = _balance(xs, p)
    sign = np.sign(vals)
    return int(np.count_nonzero(sign[:-1] * sign[1:] < 0) + np.count_nonzero(vals[1:] == 0.0))


def fold_points(
    p_base: EcoParams,
    c_min: float,
    c_max: float,
    tol: float = 1e-4,
    n_scan: int = 400,
) -> FoldPoints:
    """Locate the extraction rates where the bistable band begins and ends.

    A coarse scan finds the band (grid cells with three positive roots);
    each boundary is then refined by bisection on the positive-root count
    until the c-bracket is narrower than tol.  Raises NoBistabilityError if
    no bistable cell is found, or if the band is not contained strictly
    inside [c_min, c_max].
    """
    if not (0 <= c_min < c_max):
        raise ValueError(f"need 0 <= c_min < c_max, got [{c_min}, {c_max}]")
    if not tol > 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    grid = np.linspace(c_min, c_max, n_scan)
    bistable = np.array([_positive_root_count(replace(p_base, c=float(c))) >= 3 for c in grid])
    hits = np.flatnonzero(bistable)
    if hits.size == 0:
        raise NoBistabilityError(
            f"no bistable extraction interval found in [{c_min}, {c_max}] "
            f"(scanned {n_scan} points)"
        )
    if hits[0] == 0 or hits[-1] == n_scan - 1:
        raise NoBistabilityError(
            f"bistable band touches the scan boundary of [{c_min}, {c_max}]; widen the range"
        )

    def refine(lo: float, hi: float) -> float:
        # invariant: bistability differs between lo and hi
        lo_bi = _positive_root_count(replace(p_base, c=lo)) >= 3
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if (_positive_root_count(replace(p_base, c=mid)) >= 3) == lo_bi:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    c_low = refine(float(grid[hits[0] - 1]), float(grid[hits[0]]))
    c_high = refine(float(grid[hits[-1]]), float(grid[hits[-1] + 1]))
    return FoldPoints(c_low=c_low, c_high=c_high)
