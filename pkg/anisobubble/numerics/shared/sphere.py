from scipy.special import roots_jacobi
import numpy as np


def sphere_rule(n, order):
    """
    Product rule on the unit sphere of R^n.

    The circle uses 2 * order equispaced angles. Each further polar angle t = cos(theta)
    uses order Gauss-Jacobi nodes for the weight (1 - t^2)^((d - 2) / 2) of S^d.

    Returns:
        (nodes, weights) with nodes of shape (M, n) and weights summing to |S^{n-1}|.
    """
    if n < 2:
        raise ValueError(f'The dimension specified \'{n}\' is not supported.')
    m = 2 * order
    phi = 2 * np.pi * (np.arange(m) + 0.5) / m
    nodes = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    weights = np.full(m, 2 * np.pi / m)
    for d in range(2, n):
        alpha = (d - 2) / 2
        t, wt = roots_jacobi(order, alpha, alpha)
        s = np.sqrt(1 - t ** 2)
        count = len(nodes)
        nodes = np.concatenate(
            [
                np.repeat(s, count)[:, None] * np.tile(nodes, (order, 1)),
                np.repeat(t, count)[:, None],
            ],
            axis=1,
        )
        weights = np.repeat(wt, count) * np.tile(weights, order)
    return nodes, weights
