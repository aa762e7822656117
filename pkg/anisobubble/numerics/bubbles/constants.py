"""
Exponents and normalizing constants of the (p, H)-bubble family. Every formula that
depends only on (n, p) lives here.
"""
from anisobubble.numerics.quadrature.constants import DEFAULT_S_MIN
import math

# Inner shells of bubble rules keep |grad U| above this fraction of its scale.
INNER_GRADIENT_FLOOR = 1e-5


def validate_exponents(n, p):
    if int(n) != n or n < 2:
        raise ValueError(f'The dimension specified \'{n}\' is not supported.')
    if not 1 < p < n:
        raise ValueError(f'The exponent p specified \'{p}\' is not supported; need 1 < p < n={n}.')


def critical_exponent(n, p):
    """
    p* = np / (n - p).
    """
    validate_exponents(n, p)
    return n * p / (n - p)


def conjugate_exponent(p):
    """
    p / (p - 1), the exponent of H_0 in the bubble profile.
    """
    if not p > 1:
        raise ValueError(f'The exponent p specified \'{p}\' is not supported.')
    return p / (p - 1)


def bubble_exponent(n, p):
    """
    (n - p) / p, the power of the bubble profile and the weight of T_{z,lam}.
    """
    validate_exponents(n, p)
    return (n - p) / p


def decay_exponent(n, p):
    """
    (n - p) / (p - 1), the decay rate of a bubble at infinity.
    """
    validate_exponents(n, p)
    return (n - p) / (p - 1)


def bubble_constant(n, p):
    """
    n^(1/p) ((n - p) / (p - 1))^((p - 1) / p).
    """
    validate_exponents(n, p)
    return n ** (1 / p) * ((n - p) / (p - 1)) ** ((p - 1) / p)


def pfunction_constant(n, p):
    """
    (p / (n - p))^(p - 1), the zeroth-order coefficient of the P-function.
    """
    validate_exponents(n, p)
    return (p / (n - p)) ** (p - 1)


def v_exponent(n, p):
    """
    -p / (n - p), so that v = u^(v_exponent) turns bubbles into H_0^(p/(p-1)) paraboloids.
    """
    validate_exponents(n, p)
    return -p / (n - p)


def inner_log_radius(p, floor=DEFAULT_S_MIN):
    """
    Smallest s = log(rho / lam) for a bubble rule: the larger of floor and the s at which
    rho^{1/(p-1)}, the size of |grad U| near the center, falls to INNER_GRADIENT_FLOOR.
    The latter wins for p <= 2.
    """
    return max(floor, math.log(INNER_GRADIENT_FLOOR) / (conjugate_exponent(p) - 1))
