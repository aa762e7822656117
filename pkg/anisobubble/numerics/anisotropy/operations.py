from anisobubble.numerics.errors import DerivativeAtOriginError, JacobianAtOriginError
from anisobubble.numerics.shared.utils import as_points, outer, restore
import numpy as np


def _check_p(p):
    if not p > 1:
        raise ValueError(f'The exponent p specified \'{p}\' is not supported; p must exceed 1.')


def eval_norm_with_derivatives(norm, xi, derivatives=True):
    """
    Evaluates H(xi) with its analytic gradient and Hessian.

    Args:
        norm: AnisotropicNorm.
        xi: vector in R^n.
        derivatives: when False at xi = 0, returns (0, None, None) instead of raising.

    Returns:
        (H, grad, hess); grad is 0-homogeneous and hess is (-1)-homogeneous.
    """
    xi = np.asarray(xi, dtype=float)
    if xi.ndim != 1:
        raise ValueError('eval_norm_with_derivatives expects a single vector.')
    if not np.any(xi):
        if derivatives:
            raise DerivativeAtOriginError('H is not differentiable at the origin')
        return 0.0, None, None
    h, grad, hess = norm.evaluate(xi, order=2 if derivatives else 0)
    return float(h), grad, hess


def dual_norm(norm, x):
    """
    Returns (H_0(x), grad H_0(x)). The gradient is the maximizing xi* with H(xi*) = 1;
    at x = 0 it is undefined and returned as None.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError('dual_norm expects a single vector.')
    if not np.any(x):
        return 0.0, None
    h0, grad, _ = norm.dual_evaluate(x, order=1)
    return float(h0), grad


def stress_field(norm, p, xi):
    """
    a(xi) = H^{p-1}(xi) grad H(xi) for a batch of vectors, with a(0) = 0.
    """
    _check_p(p)
    points, single = as_points(xi, norm.n)
    h, g, _ = norm.evaluate(points, order=1)
    a = np.zeros_like(points)
    nonzero = h > 0
    a[nonzero] = h[nonzero, None] ** (p - 1) * g[nonzero]
    return restore(a, single)


def stress_jacobian_field(norm, p, xi):
    """
    A(xi) = hess (H^p / p) = (p - 1) H^{p-2} grad H grad H^T + H^{p-1} hess H for a batch
    of vectors. Rows with xi = 0 are NaN.
    """
    _check_p(p)
    points, single = as_points(xi, norm.n)
    h, g, hh = norm.evaluate(points, order=2)
    jac = np.full((len(points), norm.n, norm.n), np.nan)
    nonzero = h > 0
    hn = h[nonzero, None, None]
    jac[nonzero] = (p - 1) * hn ** (p - 2) * outer(g[nonzero]) + hn ** (p - 1) * hh[nonzero]
    return restore(jac, single)


def stress(norm, p, xi):
    return stress_field(norm, p, xi)


def stress_jacobian(norm, p, xi):
    points, _ = as_points(xi, norm.n)
    if not np.all(np.any(points != 0, axis=1)):
        raise JacobianAtOriginError('The stress Jacobian is undefined at the origin')
    return stress_jacobian_field(norm, p, xi)
