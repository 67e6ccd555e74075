"""Input validation and extended-real helpers shared by every module."""

import math

import numpy as np

from .errors import InputError

INF = math.inf

# Equality tolerance is absolute for magnitudes up to 1e3 and relative beyond.
_ABS_SCALE = 1e3


def as_vector(b, dim=None, name="b"):
    """Return ``b`` as a 1-d float array, checking its length against ``dim``."""
    arr = np.asarray(b, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise InputError(f"{name} must be a vector, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise InputError(f"{name} has length {arr.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} has non-finite entries")
    return arr


def as_points(B, dim=None, name="points"):
    """Return ``B`` as an (N, dim) float array."""
    arr = np.asarray(B, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1) if dim is None or arr.shape[0] == dim else arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise InputError(f"{name} must be a 2-d array, got shape {arr.shape}")
    if dim is not None and arr.shape[1] != dim:
        raise InputError(f"{name} has {arr.shape[1]} columns, expected {dim}")
    return arr


def as_matrix(M, shape=None, name="matrix"):
    arr = np.atleast_2d(np.asarray(M, dtype=float))
    if arr.ndim != 2:
        raise InputError(f"{name} must be 2-d, got shape {arr.shape}")
    if shape is not None and arr.shape != tuple(shape):
        raise InputError(f"{name} has shape {arr.shape}, expected {tuple(shape)}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} has non-finite entries")
    return arr


def frozen(arr):
    arr = np.array(arr, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


def scaled_tol(tol, *magnitudes):
    """``tol`` for magnitudes up to 1e3, growing linearly beyond."""
    m = 0.0
    for v in magnitudes:
        if v is not None and math.isfinite(v):
            m = max(m, abs(v))
    return tol * max(1.0, m / _ABS_SCALE)


def ext_sub(a, b):
    """``a - b`` on the extended reals; ``+inf - finite`` stays ``+inf``."""
    if math.isinf(a) or math.isinf(b):
        if math.isinf(a) and math.isinf(b) and (a > 0) == (b > 0):
            raise InputError("indeterminate inf - inf")
        if math.isinf(a):
            return a
        return -b
    return a - b


def le_tol(a, b, tol):
    """``a <= b`` up to ``tol``, with the usual conventions for infinities."""
    if a == -INF or b == INF:
        return True
    if a == INF or b == -INF:
        return False
    return a <= b + scaled_tol(tol, a, b)


def excess(a, b):
    """Signed amount by which ``a`` exceeds ``b`` on the extended reals.

    Equal infinities give 0, so ``+inf <= +inf`` counts as satisfied.
    """
    if math.isinf(a) and a == b:
        return 0.0
    if a == -INF or b == INF:
        return -INF
    if a == INF or b == -INF:
        return INF
    return a - b


def close_tol(a, b, tol):
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= scaled_tol(tol, a, b)


def rng_from(seed):
    return np.random.default_rng(seed)
