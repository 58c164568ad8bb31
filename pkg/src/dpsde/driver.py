"""Time grids, delay index maps and reproducible Brownian increments.

All processes are discretized on one uniform grid t_k = k*h, h = T/L.  The
delay parameter n of the approximation scheme only selects a lag of
m = L/(n*T) whole grid steps, which must divide evenly; the two lag
conventions of the scheme are

    raw lag      k -> k - m        (integrand history; negative index means
                                    the constant pre-time segment)
    clamped lag  k -> max(k - m, 0)   (running-extrema arguments)

Brownian increments are drawn per path from a counter-based Philox stream
keyed by (master_seed, path_index), so any path can be regenerated in
isolation and results never depend on execution order.  Gaussians come from
numpy's ziggurat sampler (inverse-free); everything is bitwise reproducible
for a fixed numpy build.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DelayNotAligned, DelayTooFine, InvalidGrid

__all__ = [
    "SimGrid",
    "LagMap",
    "BrownianDriver",
    "make_grid",
    "lag_map",
    "generate_increments",
    "brownian_values",
    "coarsen_increments",
    "coarsen_values",
]

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SimGrid:
    """Uniform grid with L steps on [0, T]; t_k = k * step_size."""

    steps: int
    horizon: float

    @property
    def step_size(self) -> float:
        return self.horizon / self.steps

    def times(self) -> np.ndarray:
        """All L+1 grid times, computed as k*h for bit-stable indexing."""
        return np.arange(self.steps + 1) * self.step_size


@dataclass(frozen=True)
class LagMap:
    """Delay of a whole number of grid steps (m >= 1)."""

    lag_steps: int

    def clamped(self, k: int) -> int:
        """Index of the clamped lag max(t_k - delay, 0)."""
        return max(k - self.lag_steps, 0)

    def raw(self, k: int) -> int:
        """Index of the raw lag t_k - delay; negative means pre-time history."""
        return k - self.lag_steps


def make_grid(steps: int, horizon: float) -> SimGrid:
    """Build a uniform grid; raises InvalidGrid on steps < 1 or horizon <= 0."""
    if steps < 1:
        raise InvalidGrid(f"steps must be >= 1, got {steps}")
    if not np.isfinite(horizon) or horizon <= 0.0:
        raise InvalidGrid(f"horizon must be finite and > 0, got {horizon}")
    return SimGrid(steps=int(steps), horizon=float(horizon))


def lag_map(grid: SimGrid, n: int) -> LagMap:
    """Map the delay 1/n onto the grid as a whole number of steps.

    Requires n >= 1, delay at most the horizon, and L/(n*T) to be a positive
    integer; raises DelayTooFine when the delay rounds below one step and
    DelayNotAligned when divisibility fails.
    """
    if n < 1:
        raise DelayNotAligned(f"delay parameter n must be >= 1, got {n}")
    exact = grid.steps / (n * grid.horizon)
    m = int(round(exact))
    if m < 1:
        raise DelayTooFine(f"delay 1/{n} is below one grid step h={grid.step_size!r}")
    if abs(exact - m) > 1e-9 * max(1.0, m):
        raise DelayNotAligned(f"L/(n*T) = {exact!r} is not an integer (L={grid.steps}, n={n}, T={grid.horizon!r})")
    if m > grid.steps:
        raise DelayNotAligned(f"delay 1/{n} exceeds the horizon {grid.horizon!r}")
    return LagMap(lag_steps=m)


def _philox_key(master_seed: int, path_index: int) -> int:
    # 128-bit key: high word = seed, low word = path index.  Distinct keys
    # give statistically independent Philox streams, so per-path draws are
    # order-independent by construction.
    return ((master_seed & _MASK64) << 64) | (path_index & _MASK64)


def generate_increments(master_seed: int, path_index: int, grid: SimGrid) -> np.ndarray:
    """L centered Gaussian increments of variance h for one path.

    Deterministic given (master_seed, path_index, grid); distinct path
    indices use disjoint counter-based streams.
    """
    gen = np.random.Generator(np.random.Philox(key=_philox_key(master_seed, path_index)))
    return gen.standard_normal(grid.steps) * np.sqrt(grid.step_size)


@dataclass(frozen=True)
class BrownianDriver:
    """Handle for one path's increment stream (seed + substream index)."""

    master_seed: int
    path_index: int

    def increments(self, grid: SimGrid) -> np.ndarray:
        return generate_increments(self.master_seed, self.path_index, grid)


def brownian_values(increments: np.ndarray) -> np.ndarray:
    """Brownian path W_0 = 0, W_k = W_{k-1} + dW_{k-1} (length L+1)."""
    increments = np.asarray(increments, dtype=float)
    out = np.empty(increments.shape[:-1] + (increments.shape[-1] + 1,))
    out[..., 0] = 0.0
    np.cumsum(increments, axis=-1, out=out[..., 1:])
    return out


def coarsen_increments(fine: np.ndarray, factor: int) -> np.ndarray:
    """Aggregate fine increments in groups of ``factor`` (telescoping sums).

    The coarse path is the same Brownian motion observed on the coarser
    grid; summation is left-to-right within each group, so reconstructed
    values agree with the fine ones at shared times up to float roundoff.
    For bitwise-equal coupled values across resolutions use
    :func:`coarsen_values` on the cumulative path instead.
    """
    fine = np.asarray(fine, dtype=float)
    L = fine.shape[-1]
    if factor < 1 or L % factor != 0:
        raise InvalidGrid(f"factor {factor} does not divide {L} increments")
    return np.add.reduceat(fine, np.arange(0, L, factor), axis=-1)


def coarsen_values(values: np.ndarray, factor: int) -> np.ndarray:
    """Subsample a Brownian path to a factor-coarser grid (bitwise exact)."""
    values = np.asarray(values, dtype=float)
    if factor < 1 or (values.shape[-1] - 1) % factor != 0:
        raise InvalidGrid(f"factor {factor} does not divide {values.shape[-1] - 1} steps")
    return values[..., ::factor]
