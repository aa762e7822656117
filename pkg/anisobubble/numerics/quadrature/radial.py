from anisobubble.numerics.errors import TailDivergenceError
from anisobubble.numerics.quadrature.constants import (
    TAIL_CHECK_LEVELS,
    TAIL_CHECK_START,
    TAIL_RATIO,
    TAIL_RELATIVE_FLOOR,
)
from scipy.integrate import quad
import logging
import numpy as np

logger = logging.getLogger(__name__)

QUAD_OPTIONS = dict(epsabs=0.0, epsrel=1e-12, limit=400)


def _tail_increments(integrand):
    edges = [1.0] + [TAIL_CHECK_START * 2 ** k for k in range(TAIL_CHECK_LEVELS)]
    return [quad(integrand, a, b, **QUAD_OPTIONS)[0] for a, b in zip(edges[:-1], edges[1:])]


def radial_reduce(norm, g, n=None):
    """
    Integral over R^n of g(H_0(x)), reduced to n |B_1^{H_0}| * int_0^inf g(rho) rho^(n-1) drho.

    The tail is checked on the dyadic shells [10 * 2^(k-1), 10 * 2^k]: when the last
    increment neither falls below TAIL_RELATIVE_FLOOR of the running total nor shrinks
    against the previous one, the integral is declared divergent.
    """
    n = norm.n if n is None else int(n)
    if n != norm.n:
        raise ValueError(f'The norm has dimension {norm.n}, got n={n}.')

    def integrand(rho):
        return float(g(rho)) * rho ** (n - 1)

    head, _ = quad(integrand, 0.0, 1.0, **QUAD_OPTIONS)
    increments = _tail_increments(integrand)
    running = head + sum(increments)
    last, previous = abs(increments[-1]), abs(increments[-2])
    if last > TAIL_RELATIVE_FLOOR * abs(running) and last >= TAIL_RATIO * previous:
        raise TailDivergenceError(
            f'Radial profile does not decay: shell increments {previous:.3e} -> {last:.3e}',
            increments=increments,
        )
    tail, _ = quad(integrand, 1.0, np.inf, **QUAD_OPTIONS)
    volume = norm.unit_ball_volume()
    logger.debug(f'radial_reduce: head={head:.6e}, tail={tail:.6e}, |B_1|={volume:.6e}')
    return float(n * volume * (head + tail))
