import numpy as np


def _steps(points, step, scale, center):
    if center is None:
        return np.full(len(points), step * scale)
    distance = np.linalg.norm(points - center, axis=1)
    return step * (scale + distance)


def central_gradient(func, points, step, scale=1.0, center=None):
    """
    Central-difference gradient of a vectorized scalar function.

    Args:
        func: maps an (N, n) array to N values.
        points: (N, n) evaluation points.
        step: relative step; the absolute step at a point is step * (scale + |x - center|),
            or step * scale when center is None.

    Returns:
        (N, n) array of partial derivatives.
    """
    points = np.asarray(points, dtype=float)
    count, n = points.shape
    h = _steps(points, step, scale, center)
    grad = np.empty((count, n))
    for j in range(n):
        shift = np.zeros((count, n))
        shift[:, j] = h
        grad[:, j] = (func(points + shift) - func(points - shift)) / (2 * h)
    return grad


def central_divergence(vector_field, points, step, scale=1.0, center=None):
    points = np.asarray(points, dtype=float)
    count, n = points.shape
    h = _steps(points, step, scale, center)
    div = np.zeros(count)
    for j in range(n):
        shift = np.zeros((count, n))
        shift[:, j] = h
        div += (vector_field(points + shift)[:, j] - vector_field(points - shift)[:, j]) / (2 * h)
    return div


def directional_derivative(func, points, directions, step):
    """
    Central difference of func along directions, with absolute step step * (1 + |direction|).
    """
    directions = np.asarray(directions, dtype=float)
    size = np.linalg.norm(directions, axis=1)
    h = step * (1.0 + size) / np.where(size > 0, size, 1.0)
    hb = h.reshape((-1,) + (1,) * (directions.ndim - 1))
    forward = func(points + hb * directions)
    backward = func(points - hb * directions)
    return (forward - backward) / (2 * h.reshape((-1,) + (1,) * (forward.ndim - 1)))
