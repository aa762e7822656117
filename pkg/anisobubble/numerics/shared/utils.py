from anisobubble.numerics.errors import CriticalSetTooLargeError
from anisobubble.numerics.shared.constants import (
    CRITICAL_SET_MAX_FRACTION,
    CRITICAL_SET_TOLERANCE,
)
import numpy as np


def as_points(x, n=None):
    """
    Returns (points, single) where points has shape (N, n) and single tells whether the
    input was a single vector.
    """
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    points = np.atleast_2d(arr)
    if points.ndim != 2:
        raise ValueError(f'Expected a vector or an (N, n) array, got shape {arr.shape}.')
    if n is not None and points.shape[1] != n:
        raise ValueError(f'Expected points of dimension {n}, got {points.shape[1]}.')
    return points, single


def restore(values, single):
    if single:
        return values[0]
    return values


def sample_unit_vectors(rng, count, n):
    vectors = rng.standard_normal((count, n))
    norms = np.linalg.norm(vectors, axis=1)
    norms[norms == 0] = 1.0
    return vectors / norms[:, None]


def outer(a, b=None):
    if b is None:
        b = a
    return a[:, :, None] * b[:, None, :]


def trace(matrices):
    return np.trace(matrices, axis1=-2, axis2=-1)


def critical_set(gradients, tolerance=CRITICAL_SET_TOLERANCE, values=None, radii=None):
    """
    Boolean mask of nodes whose gradient is not finite or smaller than
    tolerance * (1 + median |gradient|).

    With values and radii the test is relative to the local size of a decaying function:
    |gradient| (1 + r) < tolerance |value|.
    """
    gradients = np.asarray(gradients, dtype=float)
    finite = np.all(np.isfinite(gradients), axis=1)
    sizes = np.linalg.norm(np.where(finite[:, None], gradients, 0.0), axis=1)
    if values is not None:
        values = np.abs(np.asarray(values, dtype=float))
        radii = np.zeros(len(sizes)) if radii is None else np.asarray(radii, dtype=float)
        return ~finite | ~np.isfinite(values) | (sizes * (1 + radii) < tolerance * values)
    median = np.median(sizes[finite]) if finite.any() else 0.0
    return ~finite | (sizes < tolerance * (1 + median))


def check_critical_fraction(mask, limit=CRITICAL_SET_MAX_FRACTION):
    fraction = float(np.mean(mask)) if len(mask) else 0.0
    if fraction > limit:
        raise CriticalSetTooLargeError(fraction, limit)
    return fraction
