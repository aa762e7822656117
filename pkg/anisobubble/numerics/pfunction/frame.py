from anisobubble.numerics.anisotropy.operations import stress_field, stress_jacobian_field
from anisobubble.numerics.bubbles.constants import pfunction_constant, v_exponent
from anisobubble.numerics.quadrature.constants import FieldSource
from anisobubble.numerics.quadrature.fields import Field, as_field
from anisobubble.numerics.quadrature.functions import AnalyticFunction
from anisobubble.numerics.shared.logger import timer
from anisobubble.numerics.shared.utils import (
    check_critical_fraction,
    critical_set,
    outer,
    trace,
)
import logging
import numpy as np

logger = logging.getLogger(__name__)


class VTransformFunction(AnalyticFunction):
    """
    v = u^{-p/(n-p)}. Bubbles become v = (lam^{p/(p-1)} + H_0(x - z)^{p/(p-1)}) / A, a
    paraboloid in H_0.
    """

    def __init__(self, function, p):
        self.function = function
        self.n = function.n
        self.p = float(p)
        self.exponent = v_exponent(self.n, p)

    def identifier(self):
        return f'V({self.function.identifier()})'

    def _evaluate(self, points, order):
        e = self.exponent
        u, g, h = self.function._evaluate(points, order)
        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            u = np.where(u > 0, u, np.nan)
            v = u ** e
            grads = None
            hessians = None
            if order >= 1:
                grads = (e * u ** (e - 1))[:, None] * g
            if order >= 2:
                hessians = (
                    (e * u ** (e - 1))[:, None, None] * h
                    + (e * (e - 1) * u ** (e - 2))[:, None, None] * outer(g)
                )
        return v, grads, hessians


def pfunction_values(function, p, norm, points):
    """
    P = (n(p-1)/p H^p(grad v) + (p/(n-p))^{p-1}) / v from first derivatives only; finite
    on the critical set of v.
    """
    n = norm.n
    v, g, _ = VTransformFunction(function, p)._evaluate(np.atleast_2d(points), 1)
    with np.errstate(divide='ignore', invalid='ignore'):
        return (n * (p - 1) / p * norm.value(g) ** p + pfunction_constant(n, p)) / v


def pfunction_terms(norm, p, v, gradients, hessians, kappa=None):
    """
    Pointwise P-function apparatus from v and its first two derivatives.

    Returns a dict with a = a(grad v), A = hess(H^p / p)(grad v), W = A D^2 v, its trace
    and traceless part, P, grad P (chain rule) and, when kappa is given, R.
    """
    n = norm.n
    k = n * (p - 1) / p
    c = pfunction_constant(n, p)
    a = stress_field(norm, p, gradients)
    jac = stress_jacobian_field(norm, p, gradients)
    with np.errstate(divide='ignore', invalid='ignore'):
        hp = np.sum(a * gradients, axis=1)
        P = (k * hp + c) / v
        W = jac @ hessians
        tr_w = trace(W)
        Wring = W - (tr_w / n)[:, None, None] * np.eye(n)[None, :, :]
        grad_p = (
            n * (p - 1) * np.einsum('nij,nj->ni', hessians, a) / v[:, None]
            - (P / v)[:, None] * gradients
        )
        R = None if kappa is None else c * (kappa - 1) / v
    return dict(
        A=jac,
        P=P,
        R=R,
        W=W,
        Wring=Wring,
        a=a,
        grad_p=grad_p,
        tr_w=tr_w,
    )


class PFrame:
    """
    v, P, R, W and its traceless part sampled on the nodes of the rule carried by u.

    Nodes where v or its derivatives are not finite, or where grad v lies in the critical
    set, are listed in excluded_nodes; every P-function integral gives them zero weight.
    """

    def __init__(
        self,
        u,
        kappa,
        p,
        norm,
        v,
        terms,
        grad_r,
        excluded_nodes,
        center=None,
        scale=1.0,
    ):
        self.u = u
        self.kappa = kappa
        self.p = float(p)
        self.norm = norm
        self.v = v
        self.P = Field(v.rule, terms['P'], function=None, excluded_nodes=excluded_nodes)
        self.R = Field(v.rule, terms['R'], function=None, excluded_nodes=excluded_nodes)
        self.W = terms['W']
        self.Wring = terms['Wring']
        self.tr_w = terms['tr_w']
        self.stress = terms['a']
        self.stress_jacobian = terms['A']
        self.grad_p = terms['grad_p']
        self.grad_r = grad_r
        self.excluded_nodes = np.asarray(excluded_nodes, dtype=int)
        self.center = v.rule.center if center is None else np.asarray(center, dtype=float)
        self.scale = float(scale)

    def __len__(self):
        return len(self.v)

    @property
    def rule(self):
        return self.v.rule

    @property
    def n(self):
        return self.norm.n

    @property
    def keep(self):
        keep = np.ones(len(self), dtype=bool)
        keep[self.excluded_nodes] = False
        return keep

    @property
    def kappa_function(self):
        if self.kappa.function is not None:
            return self.kappa.function
        return None

    def evaluate(self, points):
        """
        Recomputes the pointwise terms away from the nodes, for finite differences.
        """
        v, g, h = VTransformFunction(self.u.function, self.p)._evaluate(points, 2)
        kappa = None
        if self.kappa_function is not None:
            kappa = self.kappa_function._evaluate(points, 0)[0]
        terms = pfunction_terms(self.norm, self.p, v, g, h, kappa)
        return dict(terms, v=v, grad_v=g, hess_v=h)

    def resampled(self, rule):
        return build_pframe(
            self.u.function,
            self.kappa.function if self.kappa.function is not None else self.kappa,
            self.p,
            self.norm,
            rule=rule,
        )

    def to_dict(self):
        keep = self.keep
        P = self.P.values[keep]
        return dict(
            excluded=len(self.excluded_nodes),
            n=self.n,
            norm=self.norm.to_dict(),
            p=self.p,
            P_mean=float(np.mean(P)) if len(P) else None,
            rule=self.rule.to_dict(),
            size=len(self),
        )


def _fd_scale(rule):
    params = rule.params or {}
    return float(params.get('scale', params.get('radius', 1.0)))


def build_pframe(u, kappa, p, norm, rule=None):
    """
    Builds the P-function frame of (u, kappa).

    Args:
        u: positive analytic Field (or AnalyticFunction with rule).
        kappa: Field, AnalyticFunction or scalar coefficient of the equation.
        rule: optional rule to sample u on.

    Raises:
        CriticalSetTooLargeError: more than 1% of the nodes are excluded.
    """
    u_field = as_field(u, rule, order=2)
    if u_field.function is None:
        raise ValueError('build_pframe needs an analytic u.')
    rule = u_field.rule
    with timer('pfunction.build_pframe', tags=dict(p=p, family=norm.family.value, size=len(rule))):
        v = Field.sample(rule, VTransformFunction(u_field.function, p), 2)
        kappa_field = as_field(kappa, rule, order=0)

        excluded = v.mask | u_field.mask | kappa_field.mask
        radii = np.linalg.norm(rule.nodes - rule.center, axis=1)
        excluded |= critical_set(
            np.where(excluded[:, None], np.nan, v.gradient_values),
            values=np.where(excluded, np.nan, v.values),
            radii=radii,
        )

        check_critical_fraction(excluded)

        values = np.where(excluded, 1.0, v.values)
        hessians = np.where(excluded[:, None, None], 0.0, v.hessian_values)
        gradients = np.where(excluded[:, None], 1.0, v.gradient_values)
        kappa_values = np.where(excluded, 1.0, kappa_field.values)
        terms = pfunction_terms(norm, p, values, gradients, hessians, kappa_values)

        grad_r = None
        if kappa_field.source == FieldSource.ANALYTIC:
            kappa_grad = as_field(kappa_field, rule, order=1).gradient_values
            with np.errstate(divide='ignore', invalid='ignore'):
                grad_r = (
                    pfunction_constant(norm.n, p) * kappa_grad / values[:, None]
                    - (terms['R'] / values)[:, None] * gradients
                )
            grad_r = np.where(excluded[:, None], 0.0, grad_r)
            bad = ~np.all(np.isfinite(grad_r), axis=1)
            if bad.any():
                excluded |= bad
                check_critical_fraction(excluded)

    logger.debug(f'build_pframe: excluded {int(excluded.sum())} of {len(rule)} nodes')
    return PFrame(
        u_field,
        kappa_field,
        p,
        norm,
        v,
        terms,
        grad_r,
        np.flatnonzero(excluded),
        center=rule.center,
        scale=_fd_scale(rule),
    )
