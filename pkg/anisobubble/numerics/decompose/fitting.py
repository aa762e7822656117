from anisobubble.numerics.bubbles.bubble import Bubble
from anisobubble.numerics.bubbles.constants import bubble_constant, bubble_exponent, conjugate_exponent
from anisobubble.numerics.bubbles.energies import gradient_energy
from anisobubble.numerics.decompose.base import BaseEstimator
from anisobubble.numerics.decompose.constants import (
    CENTER_BOUND,
    DEFAULT_MULTISTARTS,
    HALF_HEIGHT_BAND,
    LOG_SCALE_BOUND,
    MULTISTART_SPREAD,
    OPTIMIZER_FTOL,
    OPTIMIZER_MAX_EVALUATIONS,
    OPTIMIZER_XTOL,
)
from anisobubble.numerics.quadrature.fields import Field, as_field
from anisobubble.numerics.quadrature.integrate import integrate
from anisobubble.numerics.shared.constants import BLOCK_SIZE, DEFAULT_SEED
from anisobubble.numerics.shared.logger import timer
from anisobubble.numerics.shared.multi import evaluate_in_blocks, execute_parallel
from dataclasses import dataclass, field
from scipy.optimize import minimize
from typing import Optional
import logging
import math
import numpy as np

logger = logging.getLogger(__name__)


@dataclass
class FitResult:
    bubble: Optional[Bubble]
    residual_grad_energy: float
    converged: bool
    degenerate: bool = False
    start_index: int = 0
    evaluations: int = 0
    start_objectives: list = field(default_factory=list)

    def __iter__(self):
        yield self.bubble
        yield self.residual_grad_energy

    def to_dict(self):
        return dict(
            bubble=None if self.bubble is None else self.bubble.to_dict(),
            converged=self.converged,
            degenerate=self.degenerate,
            evaluations=self.evaluations,
            residual_grad_energy=self.residual_grad_energy,
            start_index=self.start_index,
            start_objectives=self.start_objectives,
        )


def bubble_distance(u, bubble, p, norm):
    """
    int H^p(grad(u - U)) over the rule of u, the D^{1,p} distance to the p-th power.
    """
    u_field = as_field(u, None, order=1)
    grads = evaluate_in_blocks(
        lambda points: bubble.function()._evaluate(points, 1)[1],
        u_field.rule.nodes,
        BLOCK_SIZE,
    )
    diff = u_field.gradient_values - grads
    diff = np.where(np.isfinite(diff), diff, 0.0)
    value, _ = integrate(u_field.rule, norm.value(diff) ** p, exclude=u_field.excluded_nodes)
    return value


def initial_guess(u, p, norm):
    """
    (z, lam) from the argmax of u and its half-height width; None when u has no
    positive values.
    """
    values = np.where(u.mask, -np.inf, u.values)
    index = int(np.argmax(values))
    peak = values[index]
    if not peak > 0:
        return None
    n = norm.n
    m = bubble_exponent(n, p)
    q = conjugate_exponent(p)
    z = u.rule.nodes[index]
    lam_amplitude = bubble_constant(n, p) / peak ** (1 / m)

    distances = norm.dual_value(u.rule.nodes - z)
    low, high = HALF_HEIGHT_BAND
    band = (values >= low * peak) & (values <= high * peak) & (distances <= 10 * lam_amplitude)
    if not band.any():
        return z, lam_amplitude, lam_amplitude
    rho = float(np.median(distances[band]))
    lam_width = rho / (2 ** (1 / m) - 1) ** (1 / q)
    return z, lam_width, lam_amplitude


def _starts(n, lam, lam_amplitude, multistarts, seed):
    starts = [np.zeros(n + 1)]
    if multistarts > 1:
        shifted = np.zeros(n + 1)
        shifted[n] = math.log(lam_amplitude / lam)
        starts.append(shifted)
    rng = np.random.default_rng(seed)
    while len(starts) < multistarts:
        starts.append(rng.normal(0.0, MULTISTART_SPREAD, n + 1))
    return starts[:multistarts]


def fit_single_bubble(
    u,
    p,
    norm,
    init=None,
    rule=None,
    multistarts=DEFAULT_MULTISTARTS,
    seed=DEFAULT_SEED,
    max_evaluations=OPTIMIZER_MAX_EVALUATIONS,
):
    """
    Best D^{1,p} fit of a single bubble to u.

    Minimizes int H^p(grad(u - U_p[z, lam])) over ((z - z_0) / lam_0, log(lam / lam_0)) with
    bounded Powell searches from deterministic multistarts, run in parallel; the best
    objective wins, ties going to the lower start index.

    Returns:
        FitResult; unpacks as (bubble, residual_grad_energy). A u without positive values
        gives a degenerate result with bubble None.
    """
    u = as_field(u, rule, order=1)
    n = norm.n
    guess = initial_guess(u, p, norm)
    if guess is None:
        logger.warning('fit_single_bubble: u has no positive mass')
        energy, _ = gradient_energy(u, p, norm)
        return FitResult(bubble=None, residual_grad_energy=energy, converged=False, degenerate=True)
    z0, lam0, lam_amplitude = guess
    if init is not None:
        z0, lam0 = np.asarray(init[0], dtype=float), float(init[1])

    def _bubble(theta):
        return Bubble(norm, p, z0 + lam0 * theta[:n], lam0 * math.exp(theta[n]))

    def _objective(theta):
        return bubble_distance(u, _bubble(theta), p, norm)

    bounds = [(-CENTER_BOUND, CENTER_BOUND)] * n + [(-LOG_SCALE_BOUND, LOG_SCALE_BOUND)]

    def _search(start):
        return minimize(
            _objective,
            start,
            method='Powell',
            bounds=bounds,
            options=dict(xtol=OPTIMIZER_XTOL, ftol=OPTIMIZER_FTOL, maxfev=max_evaluations),
        )

    with timer('decompose.fit_single_bubble', tags=dict(n=n, p=p, multistarts=multistarts)):
        results = execute_parallel([
            (_search, (start,)) for start in _starts(n, lam0, lam_amplitude, multistarts, seed)
        ])
    index = min(range(len(results)), key=lambda i: (results[i].fun, i))
    best = results[index]
    if not best.success:
        logger.warning(f'fit_single_bubble: search stopped without convergence: {best.message}')
    return FitResult(
        bubble=_bubble(best.x),
        residual_grad_energy=float(best.fun),
        converged=bool(best.success),
        start_index=index,
        evaluations=int(sum(r.nfev for r in results)),
        start_objectives=[float(r.fun) for r in results],
    )


def subtract_bubble(u, bubble):
    """
    u - U as a Field on the rule of u, keeping u's derivative order.
    """
    order = max(u.order, 1)
    if u.function is not None:
        return Field.sample(u.rule, u.function - bubble.function(), order)
    values, grads, hessians = evaluate_in_blocks(
        lambda points: bubble.function()._evaluate(points, order),
        u.rule.nodes,
        BLOCK_SIZE,
    )
    return Field(
        u.rule,
        u.values - values,
        gradient_values=u.gradient_values - grads,
        hessian_values=None if hessians is None or u.hessian_values is None else u.hessian_values - hessians,
        excluded_nodes=u.excluded_nodes,
    )


class BubbleFitter(BaseEstimator):
    """
    Single-bubble extraction as an estimator: fit finds the best bubble, transform
    returns the remainder u - U.
    """

    def __init__(
        self,
        p,
        norm,
        init=None,
        multistarts=DEFAULT_MULTISTARTS,
        seed=DEFAULT_SEED,
    ):
        self.p = p
        self.norm = norm
        self.init = init
        self.multistarts = multistarts
        self.seed = seed

    def fit(self, X, y=None):
        self.result_ = fit_single_bubble(
            self._as_field(X),
            self.p,
            self.norm,
            init=self.init,
            multistarts=self.multistarts,
            seed=self.seed,
        )
        self.bubble_ = self.result_.bubble
        return self

    def transform(self, X, **kwargs):
        self._require_fitted('bubble_')
        return subtract_bubble(self._as_field(X), self.bubble_)
