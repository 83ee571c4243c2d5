"""Small input-validation helpers shared by the estimators and core functions."""

import numbers

import numpy as np


def check_point(x, name="x"):
    """Coerce to a 1-d float64 point of dimension >= 1."""
    p = np.asarray(x, dtype=float)
    if p.ndim != 1 or p.size < 1:
        raise ValueError(f"{name} must be a 1-d coordinate vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError(f"{name} contains non-finite values")
    return p


def check_points(X, name="X", allow_empty=False):
    """Coerce to an (n, d) float64 array of points."""
    A = np.asarray(X, dtype=float)
    if A.ndim == 1 and A.size == 0:
        A = A.reshape(0, 2)
    if A.ndim != 2:
        raise ValueError(f"{name} must be a 2-d array of points, got shape {A.shape}")
    if not allow_empty and A.shape[0] == 0:
        raise ValueError(f"{name} must contain at least one point")
    if A.size and not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains non-finite values")
    return A


def check_positive(value, name):
    if not isinstance(value, numbers.Real) or not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")
    return float(value)


def check_nonnegative(value, name):
    if not isinstance(value, numbers.Real) or not np.isfinite(value) or value < 0:
        raise ValueError(f"{name} must be a nonnegative finite number, got {value!r}")
    return float(value)


def check_count(value, name, minimum=0):
    if not isinstance(value, numbers.Integral) or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def check_in_open_unit_interval(value, name):
    v = float(value)
    if not (0.0 < v < 1.0):
        raise ValueError(f"{name} must lie strictly between 0 and 1, got {value!r}")
    return v


def check_grid_axes(grid):
    """Accept (xs, ys) axis vectors and return them as float64 arrays.

    Axes must be strictly increasing with at least one node each.
    """
    if not (isinstance(grid, (tuple, list)) and len(grid) == 2):
        raise ValueError("grid must be a pair (xs, ys) of axis vectors")
    xs = np.asarray(grid[0], dtype=float).ravel()
    ys = np.asarray(grid[1], dtype=float).ravel()
    for axis, nm in ((xs, "xs"), (ys, "ys")):
        if axis.size < 1:
            raise ValueError(f"grid axis {nm} is empty")
        if axis.size > 1 and not np.all(np.diff(axis) > 0):
            raise ValueError(f"grid axis {nm} must be strictly increasing")
        if not np.all(np.isfinite(axis)):
            raise ValueError(f"grid axis {nm} contains non-finite values")
    return xs, ys
