"""Skorohod reflection map and running extrema on sampled paths.

For a path y with y_0 >= 0 the discrete Skorohod map returns the unique
pair (z, k) with

    z_j = y_j + k_j,   k_j = max_{i <= j} (-y_i)^+,

so z >= 0 everywhere, k is non-decreasing with k_0 = 0, and k increases at
j only when z_j = 0 ("flat off" the zero set) -- the last identity is exact
on grids: a new maximum of (-y)^+ at j forces k_j = -y_j and hence
z_j = y_j + (-y_j) = 0 in IEEE arithmetic.

Inputs may be 1-D (one path) or 2-D (paths, L+1) batches; all functions are
pure.
"""

from __future__ import annotations

import numpy as np

from .errors import EmptyInput, NegativeStart

__all__ = ["skorohod_map", "running_max", "running_min"]


def running_max(values: np.ndarray) -> np.ndarray:
    """Prefix maxima along the last axis; raises EmptyInput on an empty path."""
    values = np.asarray(values, dtype=float)
    if values.shape[-1] == 0:
        raise EmptyInput("running_max of an empty sequence")
    return np.maximum.accumulate(values, axis=-1)


def running_min(values: np.ndarray) -> np.ndarray:
    """Prefix minima along the last axis; raises EmptyInput on an empty path."""
    values = np.asarray(values, dtype=float)
    if values.shape[-1] == 0:
        raise EmptyInput("running_min of an empty sequence")
    return np.minimum.accumulate(values, axis=-1)


def skorohod_map(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Reflect y at zero: returns (z, k) with z = y + k >= 0.

    Raises NegativeStart when any path starts below zero.
    """
    y = np.asarray(y, dtype=float)
    if y.shape[-1] == 0:
        raise EmptyInput("skorohod_map of an empty path")
    if np.any(y[..., 0] < 0.0):
        raise NegativeStart("skorohod_map requires y_0 >= 0")
    k = np.maximum.accumulate(np.maximum(-y, 0.0), axis=-1)
    return y + k, k
