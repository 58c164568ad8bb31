"""Caratheodory approximations for the doubly perturbed SDE.

The target equation perturbs an Ito diffusion by alpha times its running
maximum and beta times its running minimum:

    X_t = x0 + int_0^t b(s, X_s) ds + int_0^t sigma(s, X_s) dW_s
          + alpha * max_{s<=t} X_s + beta * min_{s<=t} X_s.

All schemes evaluate the coefficients at the delayed state X(s - 1/n),
which makes the construction explicit step by step.  Writing Phi for the
delayed drift+diffusion integral, the running-extrema scheme (x0 = 0)
maintains the triple (Phi, M, I):

    M_k = (max_{j<=k} [Phi_j + beta * I_{lag+(j)}])^+ / (1 - alpha)
    I_k = (max_{j<=k} [-Phi_j - alpha * M_{lag+(j)}])^+ / (beta - 1)
    X_k = Phi_k + alpha * M_k + beta * I_k,

where lag+(j) = max(j - m, 0) is the clamped delay.  Each max is over
quantities known strictly before step k (lag+(j) <= j-1), so the recursion
is explicit; (max_j g_j)^+ equals max_j (g_j)^+ because x -> x^+ is
non-decreasing, so a single clamp after the running max suffices.  Since
1 - alpha > 0 and beta - 1 < 0, M is non-decreasing and >= 0 while I is
non-increasing and <= 0.

Two other variants are provided: the plain delayed scheme that feeds the
lagged state directly into running max/min (any x0), and the general-x0
variant whose extremum formulas carry x0 explicitly, drop the positive
part, and start all three components from x0 / (1 - alpha - beta).

Increments enter integrals by left-point (Ito) sums.  Raw lags (integrand
arguments) fall back to the constant pre-time segment when they reach
negative times; clamped lags never do.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .driver import LagMap, SimGrid, lag_map
from .errors import DPSDEError
from .models import CoefficientModel
from .params import PerturbationParams

__all__ = [
    "SchemePath",
    "phi_step",
    "simulate_new",
    "simulate_old",
    "simulate_general_x0",
    "simulate_new_batch",
    "simulate_old_batch",
    "simulate_general_x0_batch",
]


@dataclass(frozen=True)
class SchemePath:
    """One scheme run on the grid: Phi, M, I, X sampled at t_0..t_L."""

    phi: np.ndarray
    big_m: np.ndarray
    big_i: np.ndarray
    x: np.ndarray
    n: int
    lag: LagMap
    grid: SimGrid


def phi_step(
    model: CoefficientModel,
    params: PerturbationParams,
    grid: SimGrid,
    lag: LagMap,
    x_history,
    increments,
    k: int,
    history: float | None = None,
) -> float:
    """Increment of the delayed integral Phi over (t_{k-1}, t_k].

    Left-point evaluation: b(t_{k-1}, X_lag)*h + sigma(t_{k-1}, X_lag)*dW
    with X_lag read m steps back from x_history, or equal to the constant
    pre-time value (``history``, default params.x0) when the raw lag lands
    before time zero.
    """
    if k < 1:
        raise ValueError("phi_step needs k >= 1")
    if history is None:
        history = params.x0
    j = k - 1 - lag.lag_steps
    xlag = x_history[j] if j >= 0 else history
    t_prev = (k - 1) * grid.step_size
    dw = increments[k - 1]
    return model.drift(t_prev, xlag) * grid.step_size + model.diffusion(t_prev, xlag) * dw


def _as_lb(increments: np.ndarray) -> np.ndarray:
    """Increments as a contiguous (L, B) array (time-major for row slicing)."""
    arr = np.asarray(increments, dtype=float)
    if arr.ndim == 1:
        return np.ascontiguousarray(arr[:, None])
    if arr.ndim == 2:
        return np.ascontiguousarray(arr.T)
    raise ValueError(f"increments must be 1-D or (paths, L), got shape {arr.shape}")


def _new_kernel(model, alpha, beta, h, m, dw):
    L, B = dw.shape
    phi = np.zeros((L + 1, B))
    big_m = np.zeros((L + 1, B))
    big_i = np.zeros((L + 1, B))
    x = np.zeros((L + 1, B))
    hist = np.zeros(B)
    gmax = np.zeros(B)
    qmax = np.zeros(B)
    one_m_alpha = 1.0 - alpha
    beta_m1 = beta - 1.0
    drift, diffusion = model.drift, model.diffusion
    for k in range(1, L + 1):
        j = k - 1 - m
        xlag = x[j] if j >= 0 else hist
        t_prev = (k - 1) * h
        p = phi[k - 1] + (drift(t_prev, xlag) * h + diffusion(t_prev, xlag) * dw[k - 1])
        phi[k] = p
        lk = k - m if k >= m else 0
        np.maximum(gmax, p + beta * big_i[lk], out=gmax)
        mk = np.maximum(gmax, 0.0) / one_m_alpha
        big_m[k] = mk
        np.maximum(qmax, -p - alpha * big_m[lk], out=qmax)
        ik = np.maximum(qmax, 0.0) / beta_m1
        big_i[k] = ik
        x[k] = p + alpha * mk + beta * ik
    return phi, big_m, big_i, x


def _old_kernel(model, alpha, beta, x0, h, m, dw):
    L, B = dw.shape
    phi = np.zeros((L + 1, B))
    big_m = np.empty((L + 1, B))
    big_i = np.empty((L + 1, B))
    x = np.empty((L + 1, B))
    hist = np.full(B, x0)
    x[0] = x0
    vmax = np.full(B, x0)
    vmin = np.full(B, x0)
    big_m[0] = vmax
    big_i[0] = vmin
    drift, diffusion = model.drift, model.diffusion
    for k in range(1, L + 1):
        j = k - 1 - m
        xlag = x[j] if j >= 0 else hist
        t_prev = (k - 1) * h
        p = phi[k - 1] + (drift(t_prev, xlag) * h + diffusion(t_prev, xlag) * dw[k - 1])
        phi[k] = p
        jv = k - m
        v = x[jv] if jv >= 0 else hist
        np.maximum(vmax, v, out=vmax)
        np.minimum(vmin, v, out=vmin)
        big_m[k] = vmax
        big_i[k] = vmin
        x[k] = x0 + p + alpha * vmax + beta * vmin
    return phi, big_m, big_i, x


def _general_kernel(model, alpha, beta, x0, h, m, dw):
    L, B = dw.shape
    c = x0 / (1.0 - alpha - beta)
    phi = np.zeros((L + 1, B))
    big_m = np.empty((L + 1, B))
    big_i = np.empty((L + 1, B))
    x = np.empty((L + 1, B))
    hist = np.full(B, c)
    one_m_alpha = 1.0 - alpha
    beta_m1 = beta - 1.0
    # the time-zero components go through the same expressions as every
    # later step (value c up to roundoff), keeping monotonicity and the
    # step identity exact rather than one ulp off
    gmax = np.full(B, x0 + beta * c)
    qmax = np.full(B, -x0 - alpha * c)
    big_m[0] = gmax / one_m_alpha
    big_i[0] = qmax / beta_m1
    x[0] = x0 + alpha * big_m[0] + beta * big_i[0]
    drift, diffusion = model.drift, model.diffusion
    for k in range(1, L + 1):
        j = k - 1 - m
        xlag = x[j] if j >= 0 else hist
        t_prev = (k - 1) * h
        p = phi[k - 1] + (drift(t_prev, xlag) * h + diffusion(t_prev, xlag) * dw[k - 1])
        phi[k] = p
        lk = k - m if k >= m else 0
        np.maximum(gmax, x0 + p + beta * big_i[lk], out=gmax)
        mk = gmax / one_m_alpha
        big_m[k] = mk
        np.maximum(qmax, -x0 - p - alpha * big_m[lk], out=qmax)
        ik = qmax / beta_m1
        big_i[k] = ik
        x[k] = x0 + p + alpha * mk + beta * ik
    return phi, big_m, big_i, x


def simulate_new_batch(
    model: CoefficientModel,
    params: PerturbationParams,
    grid: SimGrid,
    n: int,
    increments: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Run the running-extrema scheme on a (paths, L) batch of increments.

    Returns (phi, big_m, big_i, x), each of shape (paths, L+1).  Requires
    params.x0 == 0; route nonzero x0 through simulate_general_x0_batch.
    """
    if params.x0 != 0.0:
        raise DPSDEError("the running-extrema scheme requires x0 = 0; use simulate_general_x0")
    lag = lag_map(grid, n)
    dw = _as_lb(increments)
    out = _new_kernel(model, params.alpha, params.beta, grid.step_size, lag.lag_steps, dw)
    return tuple(a.T for a in out)


def simulate_old_batch(model, params, grid, n, increments):
    """Run the plain delayed scheme (lagged state into max/min) on a batch."""
    lag = lag_map(grid, n)
    dw = _as_lb(increments)
    out = _old_kernel(model, params.alpha, params.beta, params.x0, grid.step_size, lag.lag_steps, dw)
    return tuple(a.T for a in out)


def simulate_general_x0_batch(model, params, grid, n, increments):
    """Run the general-x0 scheme (no positive part, x0 in the extremum args)."""
    if abs(1.0 - params.alpha - params.beta) < 1e-15:
        raise DPSDEError("alpha + beta = 1 leaves the pre-time level x0/(1-alpha-beta) undefined")
    lag = lag_map(grid, n)
    dw = _as_lb(increments)
    out = _general_kernel(model, params.alpha, params.beta, params.x0, grid.step_size, lag.lag_steps, dw)
    return tuple(a.T for a in out)


def _single(batch_fn, model, params, grid, n, increments) -> SchemePath:
    arr = np.asarray(increments, dtype=float)
    if arr.ndim != 1:
        raise ValueError("single-path simulate_* expects a 1-D increment array")
    phi, big_m, big_i, x = batch_fn(model, params, grid, n, arr[None, :])
    return SchemePath(
        phi=phi[0],
        big_m=big_m[0],
        big_i=big_i[0],
        x=x[0],
        n=n,
        lag=lag_map(grid, n),
        grid=grid,
    )


def simulate_new(model, params, grid, n, increments) -> SchemePath:
    """One path of the running-extrema scheme (x0 = 0)."""
    return _single(simulate_new_batch, model, params, grid, n, increments)


def simulate_old(model, params, grid, n, increments) -> SchemePath:
    """One path of the plain delayed scheme; big_m/big_i hold the lagged
    running max/min, and X_k = x0 + Phi_k + alpha*big_m_k + beta*big_i_k for
    k >= 1 (X_0 = x0 by the pre-time convention)."""
    return _single(simulate_old_batch, model, params, grid, n, increments)


def simulate_general_x0(model, params, grid, n, increments) -> SchemePath:
    """One path of the general-x0 scheme (coincides with simulate_new at x0=0)."""
    return _single(simulate_general_x0_batch, model, params, grid, n, increments)
