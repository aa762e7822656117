from anisobubble.numerics.anisotropy.operations import stress_jacobian_field
from anisobubble.numerics.bubbles.constants import critical_exponent
from anisobubble.numerics.quadrature.fields import Field, as_field
from anisobubble.numerics.quadrature.functions import AnalyticFunction
from anisobubble.numerics.shared.constants import FD_STEP, KAPPA_PRECISION_FLOOR
from anisobubble.numerics.shared.differences import central_gradient
from anisobubble.numerics.shared.logger import timer
from anisobubble.numerics.shared.utils import check_critical_fraction, critical_set, trace
import logging
import numpy as np

logger = logging.getLogger(__name__)


def anisotropic_laplacian(norm, p, gradients, hessians):
    """
    Delta_p^H u = tr(hess_xi(H^p / p)(grad u) D^2 u) at nodes off the critical set.
    """
    return trace(stress_jacobian_field(norm, p, gradients) @ hessians)


def kappa_precision_mask(norm, p, values, gradients, hessians, floor=KAPPA_PRECISION_FLOOR):
    """
    Nodes where kappa = -Delta_p^H u / u^{p*-1} carries no reliable digits.

    Delta_p^H u is a sum of terms that cancel in the tail of a decaying u. Its rounding
    error is estimated as machine epsilon times the summed magnitude of the terms, and a
    node is flagged when that estimate divided by u^{p*-1} exceeds floor * (|kappa| + 1).
    """
    p_star = critical_exponent(norm.n, p)
    terms = stress_jacobian_field(norm, p, gradients) * np.swapaxes(hessians, 1, 2)
    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        weight = np.abs(values) ** (p_star - 1)
        rounding = np.finfo(float).eps * np.sum(np.abs(terms), axis=(1, 2))
        lost = rounding > floor * (np.abs(np.sum(terms, axis=(1, 2))) + weight)
    return lost | ~np.isfinite(rounding)


class KappaFunction(AnalyticFunction):
    """
    kappa(x) = -Delta_p^H u(x) / u(x)^{p*-1}, the coefficient for which u solves the
    perturbed critical equation. Gradients are central differences at relative step
    FD_STEP around center; Hessians are not available.

    Values are not screened for cancellation; infer_kappa drops the nodes where it
    matters.
    """

    def __init__(self, function, p, norm, center=None, scale=1.0):
        self.function = function
        self.n = function.n
        self.p = float(p)
        self.norm = norm
        self.p_star = critical_exponent(self.n, p)
        self.center = np.zeros(self.n) if center is None else np.asarray(center, dtype=float)
        self.scale = float(scale)

    def identifier(self):
        return f'Kappa({self.function.identifier()}, p={self.p:g})'

    def _values(self, points):
        u, g, h = self.function._evaluate(points, 2)
        with np.errstate(divide='ignore', invalid='ignore'):
            return -anisotropic_laplacian(self.norm, self.p, g, h) / u ** (self.p_star - 1)

    def _evaluate(self, points, order):
        values = self._values(points)
        grads = None
        hessians = None
        if order >= 1:
            grads = central_gradient(self._values, points, FD_STEP, self.scale, self.center)
        if order >= 2:
            hessians = np.full((len(points), self.n, self.n), np.nan)
        return values, grads, hessians


def infer_kappa(u, p, norm, rule=None, center=None, scale=1.0):
    """
    Samples kappa = -Delta_p^H u / u^{p*-1} on the nodes of an analytic field.

    Nodes in the critical set of u are excluded; more than 1% of them raises
    CriticalSetTooLargeError. Nodes flagged by kappa_precision_mask, typically the far
    tail, are excluded as well but do not count towards that limit.
    """
    field = as_field(u, rule, order=2)
    if field.function is None:
        raise ValueError('infer_kappa needs an analytic field with second derivatives.')
    with timer('functionals.infer_kappa', tags=dict(p=p, family=norm.family.value)):
        radii = np.linalg.norm(field.rule.nodes - field.rule.center, axis=1)
        critical = critical_set(field.gradient_values, values=field.values, radii=radii) | field.mask
        check_critical_fraction(critical)
        values = np.full(len(field), np.nan)
        keep = ~critical
        lost = np.zeros(len(field), dtype=bool)
        lost[keep] = kappa_precision_mask(
            norm,
            p,
            field.values[keep],
            field.gradient_values[keep],
            field.hessian_values[keep],
        )
        keep &= ~lost
        p_star = critical_exponent(norm.n, p)
        values[keep] = -anisotropic_laplacian(
            norm,
            p,
            field.gradient_values[keep],
            field.hessian_values[keep],
        ) / field.values[keep] ** (p_star - 1)
    logger.debug(
        f'infer_kappa: excluded {int(critical.sum())} critical and {int(lost.sum())} '
        f'cancellation-limited nodes of {len(field)}'
    )
    return Field(
        field.rule,
        values,
        function=KappaFunction(field.function, p, norm, center=center, scale=scale),
        excluded_nodes=np.flatnonzero(~keep),
    )
