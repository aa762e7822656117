from anisobubble.numerics.anisotropy.operations import stress_field
from anisobubble.numerics.bubbles.bubble import Bubble
from anisobubble.numerics.bubbles.constants import (
    bubble_constant,
    conjugate_exponent,
    pfunction_constant,
)
from anisobubble.numerics.pfunction.frame import VTransformFunction, pfunction_values
from anisobubble.numerics.quadrature.constants import RuleKind
from anisobubble.numerics.quadrature.fields import as_field
from anisobubble.numerics.quadrature.functions import AnalyticFunction
from anisobubble.numerics.quadrature.integrate import weighted_sum
from anisobubble.numerics.quadrature.rules import build_rule
from anisobubble.numerics.shared.logger import timer
from anisobubble.numerics.shared.utils import outer
from anisobubble.numerics.stability.constants import (
    ASCENT_FATOL,
    ASCENT_MAX_ITERATIONS,
    ASCENT_XATOL,
    DEFAULT_T_BALL,
    STATIONARY_MAX_SHIFT,
    STATIONARY_XTOL,
)
from dataclasses import dataclass
from scipy.optimize import minimize, root
import logging
import numpy as np

logger = logging.getLogger(__name__)


class DualPowerFunction(AnalyticFunction):
    """
    offset + coefficient * H_0(x - x0)^{p/(p-1)}.
    """

    def __init__(self, norm, p, x0, offset, coefficient):
        self.norm = norm
        self.n = norm.n
        self.q = conjugate_exponent(p)
        self.x0 = np.asarray(x0, dtype=float)
        self.offset = float(offset)
        self.coefficient = float(coefficient)

    def identifier(self):
        return f'DualPower(x0={self.x0.tolist()}, offset={self.offset:g}, coefficient={self.coefficient:g})'

    def _evaluate(self, points, order):
        q = self.q
        rho, g0, h0 = self.norm.dual_evaluate(points - self.x0, order)
        values = self.offset + self.coefficient * rho ** q
        grads = None
        hessians = None
        with np.errstate(divide='ignore', invalid='ignore'):
            if order >= 1:
                grads = (self.coefficient * q * rho ** (q - 1))[:, None] * g0
                grads[rho == 0] = 0.0
            if order >= 2:
                hessians = self.coefficient * (
                    (q * (q - 1) * rho ** (q - 2))[:, None, None] * outer(g0)
                    + (q * rho ** (q - 1))[:, None, None] * h0
                )
        return values, grads, hessians


def first_approximant(norm, p, x0, v_x0, p_bar):
    """
    Q(x) = v(x0) + (p-1)/p (P_bar / n)^{1/(p-1)} H_0^{p/(p-1)}(x - x0), for which
    a(grad Q) = P_bar / n (x - x0).
    """
    n = norm.n
    return DualPowerFunction(norm, p, x0, v_x0, (p - 1) / p * (p_bar / n) ** (1 / (p - 1)))


def proof_scale(n, p, p_bar):
    """
    lam = (1 / P_bar) (p/(p-1))^{p-1} n^{1/p} ((n-p)/(p-1))^{-(p-1)^2/p}, which equals
    (p/(n-p))^{p-1} c / P_bar with c the bubble constant.
    """
    if not p_bar > 0:
        raise ValueError(f'The P average specified \'{p_bar}\' is not supported.')
    return pfunction_constant(n, p) * bubble_constant(n, p) / p_bar


def second_approximant(norm, p, x0, p_bar):
    """
    (lam^{p/(p-1)} + H_0^{p/(p-1)}(x - x0)) / (lam^{1/(p-1)} c), the v-transform of
    U_p[x0, lam] with lam = proof_scale(P_bar).
    """
    n = norm.n
    lam = proof_scale(n, p, p_bar)
    denominator = lam ** (1 / (p - 1)) * bubble_constant(n, p)
    return DualPowerFunction(norm, p, x0, lam ** conjugate_exponent(p) / denominator, 1 / denominator)


def approximant_offset(n, p, v_x0, p_bar):
    """
    The constant difference Q - Q' = v(x0) - (p/(n-p))^{p-1} / P_bar.
    """
    return v_x0 - pfunction_constant(n, p) / p_bar


@dataclass
class ProofBubbleReport:
    bubble: Bubble
    x0: np.ndarray
    p_bar: float
    v_x0: float
    offset: float
    ascent_converged: bool
    t_ball: float

    def to_dict(self):
        return dict(
            ascent_converged=self.ascent_converged,
            bubble=self.bubble.to_dict(),
            offset=self.offset,
            p_bar=self.p_bar,
            t_ball=self.t_ball,
            v_x0=self.v_x0,
            x0=self.x0.tolist(),
        )


def _stationarity_residual(function, p, norm):
    transform = VTransformFunction(function, p)

    def residual(x):
        _, gradients, _ = transform._evaluate(x[None, :], 1)
        return stress_field(norm, p, gradients)[0]

    return residual


def maximum_point(u, p=None, norm=None):
    """
    argmax of u over the nodes, refined by a Nelder-Mead ascent on the analytic u.

    Given p and norm the ascent is followed by a root solve of a(grad v) = 0 with
    v = u^{-p/(n-p)}. For a bubble a(grad v) is linear in x - z, while u itself is flat to
    order |x - z|^{p/(p-1)} at its peak.
    """
    values = np.where(u.mask, -np.inf, u.values)
    start = u.rule.nodes[int(np.argmax(values))]
    if u.function is None:
        return start, False
    function = u.function
    result = minimize(
        lambda x: -float(function._evaluate(x[None, :], 0)[0][0]),
        start,
        method='Nelder-Mead',
        options=dict(xatol=ASCENT_XATOL, fatol=ASCENT_FATOL, maxiter=ASCENT_MAX_ITERATIONS),
    )
    converged = bool(result.success)
    if not converged:
        logger.warning(f'maximum_point: ascent stopped without convergence: {result.message}')
    x = start if -result.fun < values.max() else result.x
    if p is None or norm is None:
        return x, converged

    residual = _stationarity_residual(function, p, norm)
    before = residual(x)
    if not np.all(np.isfinite(before)) or not np.any(before):
        return x, converged
    solution = root(residual, x, method='hybr', options=dict(xtol=STATIONARY_XTOL))
    after = residual(solution.x)
    if (
        np.all(np.isfinite(after))
        and np.linalg.norm(after) <= np.linalg.norm(before)
        and np.linalg.norm(solution.x - x) <= STATIONARY_MAX_SHIFT * max(1.0, np.linalg.norm(x))
    ):
        return solution.x, converged
    logger.debug(f'maximum_point: kept the ascent point, root solve ended with: {solution.message}')
    return x, converged


def proof_bubble_report(u, p, norm, t_ball=DEFAULT_T_BALL, rule=None):
    if not 0 < t_ball < 1:
        raise ValueError(f'The ball radius specified \'{t_ball}\' is not supported; use 0 < t < 1.')
    u = as_field(u, rule, order=0)
    if u.function is None:
        raise ValueError('proof_driven_bubble needs an analytic u.')
    n = norm.n
    with timer('stability.proof_driven_bubble', tags=dict(n=n, p=p, t_ball=t_ball)):
        x0, converged = maximum_point(u, p, norm)
        ball = build_rule(n, RuleKind.LOCAL_BALL, dict(center=x0, radius=t_ball), witness=False)
        P = pfunction_values(u.function, p, norm, ball.nodes)
        p_bar = weighted_sum(ball.weights, P) / weighted_sum(ball.weights, np.ones(len(ball)))
        v_x0 = float(VTransformFunction(u.function, p)._evaluate(x0[None, :], 0)[0][0])
    bubble = Bubble(norm, p, x0, proof_scale(n, p, p_bar))
    return ProofBubbleReport(
        bubble=bubble,
        x0=np.asarray(x0, dtype=float),
        p_bar=float(p_bar),
        v_x0=v_x0,
        offset=approximant_offset(n, p, v_x0, p_bar),
        ascent_converged=converged,
        t_ball=t_ball,
    )


def proof_driven_bubble(u, p, norm, t_ball=DEFAULT_T_BALL, rule=None):
    """
    The bubble U_p[x0, lam] built from the maximum point x0 of u and the average P_bar of
    the P-function over the Euclidean ball B_t(x0), with lam = proof_scale(P_bar).
    """
    return proof_bubble_report(u, p, norm, t_ball, rule).bubble
