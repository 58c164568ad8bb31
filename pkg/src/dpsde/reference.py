"""Grid solver for the limit equation and closed-form singly perturbed paths.

The limit equation determines X_{k+1} implicitly from

    X_{k+1} = x0 + Phi_{k+1} + alpha * M_{k+1} + beta * I_{k+1},

with M, I the running max/min of X itself (undelayed, left-point
coefficients).  Because a single new value can move at most one extremum,
the step has a closed-form case analysis.  Writing
D = x0 + Phi_{k+1} + alpha*M_k + beta*I_k for the no-new-extremum
candidate:

    (i)   I_k <= D <= M_k:  X_{k+1} = D, extrema unchanged;
    (ii)  D > M_k:          X_{k+1} = (x0 + Phi_{k+1} + beta*I_k)/(1-alpha),
                            a new maximum (X_{k+1} - M_k = (D-M_k)/(1-alpha) > 0);
    (iii) D < I_k:          X_{k+1} = (x0 + Phi_{k+1} + alpha*M_k)/(1-beta),
                            a new minimum.

The cases are exhaustive and mutually exclusive; ties resolve to (i) where
all three formulas coincide.  At time zero the equation itself forces
X_0 = x0 / (1 - alpha - beta) (both extrema equal the state there).

For b = 0, sigma = 1, x0 = 0 and one vanishing parameter the solution has
an explicit running-extremum form, exposed as exact_singly_perturbed and
used as an independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .driver import SimGrid, brownian_values
from .errors import DPSDEError
from .models import CoefficientModel
from .params import PerturbationParams

__all__ = [
    "ReferencePath",
    "MaxSide",
    "MinSide",
    "implicit_step",
    "solve_reference",
    "solve_reference_batch",
    "exact_singly_perturbed",
]


@dataclass(frozen=True)
class ReferencePath:
    """Solution path with its exact running extrema and integral part."""

    x: np.ndarray
    big_m: np.ndarray
    big_i: np.ndarray
    phi: np.ndarray
    grid: SimGrid


@dataclass(frozen=True)
class MaxSide:
    """Singly perturbed by the running maximum (beta = 0)."""

    alpha: float


@dataclass(frozen=True)
class MinSide:
    """Singly perturbed by the running minimum (alpha = 0)."""

    beta: float


def implicit_step(x0, alpha, beta, phi_next, big_m, big_i):
    """One closed-form implicit step; returns (x_next, big_m, big_i).

    Inputs may be scalars or aligned arrays.  Pure case arithmetic -- no
    parameter validation, so it can be exercised on illustrative values.
    """
    D = x0 + phi_next + alpha * big_m + beta * big_i
    up = D > big_m
    dn = D < big_i
    x_next = np.where(
        up,
        (x0 + phi_next + beta * big_i) / (1.0 - alpha),
        np.where(dn, (x0 + phi_next + alpha * big_m) / (1.0 - beta), D),
    )
    return x_next, np.where(up, x_next, big_m), np.where(dn, x_next, big_i)


def solve_reference_batch(
    model: CoefficientModel,
    params: PerturbationParams,
    grid: SimGrid,
    increments: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Solve the limit equation on a (paths, L) batch of increments.

    Returns (phi, big_m, big_i, x), each (paths, L+1); big_m/big_i are the
    exact running extrema of x and the step identity
    x = x0 + phi + alpha*big_m + beta*big_i holds by construction.
    """
    dw = np.asarray(increments, dtype=float)
    squeeze = dw.ndim == 1
    if squeeze:
        dw = dw[None, :]
    dw = np.ascontiguousarray(dw.T)
    L, B = dw.shape
    h = grid.step_size
    alpha, beta, x0 = params.alpha, params.beta, params.x0
    denom = 1.0 - alpha - beta
    if abs(denom) < 1e-15:
        raise DPSDEError("alpha + beta = 1 leaves the time-zero state undefined")
    c0 = x0 / denom

    phi = np.zeros((L + 1, B))
    big_m = np.empty((L + 1, B))
    big_i = np.empty((L + 1, B))
    x = np.empty((L + 1, B))
    x[0] = c0
    big_m[0] = c0
    big_i[0] = c0
    cur_x = np.full(B, c0)
    cur_m = np.full(B, c0)
    cur_i = np.full(B, c0)
    drift, diffusion = model.drift, model.diffusion
    for k in range(L):
        t_k = k * h
        p = phi[k] + (drift(t_k, cur_x) * h + diffusion(t_k, cur_x) * dw[k])
        phi[k + 1] = p
        cur_x, cur_m, cur_i = implicit_step(x0, alpha, beta, p, cur_m, cur_i)
        x[k + 1] = cur_x
        big_m[k + 1] = cur_m
        big_i[k + 1] = cur_i
    out = (phi.T, big_m.T, big_i.T, x.T)
    return out


def solve_reference(model, params, grid, increments) -> ReferencePath:
    """Solve the limit equation along one increment sequence."""
    arr = np.asarray(increments, dtype=float)
    if arr.ndim != 1:
        raise ValueError("solve_reference expects a 1-D increment array")
    phi, big_m, big_i, x = solve_reference_batch(model, params, grid, arr[None, :])
    return ReferencePath(x=x[0], big_m=big_m[0], big_i=big_i[0], phi=phi[0], grid=grid)


def exact_singly_perturbed(increments: np.ndarray, grid: SimGrid, side) -> ReferencePath:
    """Closed-form path for b = 0, sigma = 1, x0 = 0 and one parameter zero.

    MaxSide(alpha):  X = W + (alpha/(1-alpha)) * running_max(W)
    MinSide(beta):   X = W + (beta/(1-beta))  * running_min(W)

    (The positive part in the underlying reflection identity is redundant
    because the running extrema of W straddle W_0 = 0.)  big_m/big_i are
    recomputed from X itself so the usual path invariants hold.
    """
    w = brownian_values(np.asarray(increments, dtype=float))
    if isinstance(side, MaxSide):
        if side.alpha >= 1.0:
            raise DPSDEError(f"alpha must be < 1, got {side.alpha}")
        x = w + (side.alpha / (1.0 - side.alpha)) * np.maximum.accumulate(w, axis=-1)
    elif isinstance(side, MinSide):
        if side.beta >= 1.0:
            raise DPSDEError(f"beta must be < 1, got {side.beta}")
        x = w + (side.beta / (1.0 - side.beta)) * np.minimum.accumulate(w, axis=-1)
    else:
        raise TypeError(f"side must be MaxSide or MinSide, got {side!r}")
    return ReferencePath(
        x=x,
        big_m=np.maximum.accumulate(x, axis=-1),
        big_i=np.minimum.accumulate(x, axis=-1),
        phi=w,
        grid=grid,
    )
