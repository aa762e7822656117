from anisobubble.numerics.anisotropy.norms import norm_from_dict
from anisobubble.numerics.bubbles.constants import (
    bubble_constant,
    bubble_exponent,
    conjugate_exponent,
    decay_exponent,
    inner_log_radius,
    validate_exponents,
)
from anisobubble.numerics.quadrature.constants import RuleKind
from anisobubble.numerics.quadrature.functions import AnalyticFunction
from anisobubble.numerics.quadrature.rules import build_rule
from anisobubble.numerics.shared.utils import outer
import numpy as np


class Bubble:
    """
    U_p[z, lam](x) = (lam^(1/(p-1)) c / (lam^(p/(p-1)) + H_0(x - z)^(p/(p-1))))^((n-p)/p)
    with c = bubble_constant(n, p).
    """

    def __init__(self, norm, p, z, lam):
        validate_exponents(norm.n, p)
        z = np.asarray(z, dtype=float)
        if z.shape != (norm.n,):
            raise ValueError(f'The bubble center must be a vector in R^{norm.n}.')
        if not lam > 0:
            raise ValueError(f'The bubble scale specified \'{lam}\' is not supported.')
        self.norm = norm
        self.p = float(p)
        self.z = z
        self.lam = float(lam)

    def __repr__(self):
        return f'Bubble(n={self.n}, p={self.p:g}, z={self.z.tolist()}, lam={self.lam:g})'

    @property
    def n(self):
        return self.norm.n

    @property
    def center_value(self):
        return (bubble_constant(self.n, self.p) / self.lam) ** bubble_exponent(self.n, self.p)

    def function(self):
        return BubbleFunction(self)

    def evaluate(self, x, order=1):
        return self.function().evaluate(x, order)

    def to_dict(self):
        return dict(
            lam=self.lam,
            n=self.n,
            norm=self.norm.to_dict(),
            p=self.p,
            z=self.z.tolist(),
        )

    @classmethod
    def from_dict(cls, d, norm=None):
        if norm is None:
            norm = norm_from_dict(d['norm'])
        return cls(norm, d['p'], d['z'], d['lam'])


class BubbleFunction(AnalyticFunction):
    def __init__(self, bubble):
        self.bubble = bubble
        self.n = bubble.n
        p = bubble.p
        self.q = conjugate_exponent(p)
        self.m = bubble_exponent(self.n, p)
        self.amplitude = bubble.lam ** (1 / (p - 1)) * bubble_constant(self.n, p)
        self.lam_q = bubble.lam ** self.q

    def identifier(self):
        b = self.bubble
        return f'Bubble(p={b.p:g}, z={b.z.tolist()}, lam={b.lam:g})'

    def _evaluate(self, points, order):
        q, m = self.q, self.m
        rho, g0, h0 = self.bubble.norm.dual_evaluate(points - self.bubble.z, order)
        with np.errstate(divide='ignore', invalid='ignore'):
            d = self.lam_q + rho ** q
            u = (self.amplitude / d) ** m
            grads = None
            hessians = None
            if order >= 1:
                ds = q * rho[:, None] ** (q - 1) * g0
                grads = -m * (u / d)[:, None] * ds
            if order >= 2:
                d2s = (
                    q * (q - 1) * rho[:, None, None] ** (q - 2) * outer(g0)
                    + q * rho[:, None, None] ** (q - 1) * h0
                )
                hessians = (
                    -m * (u / d)[:, None, None] * d2s
                    + m * (m + 1) * (u / d ** 2)[:, None, None] * outer(ds)
                )
        return u, grads, hessians


def bubble_eval(b, x):
    """
    Value and gradient of a bubble at a single point. The gradient is None at x = z.
    """
    x = np.asarray(x, dtype=float)
    value, gradient, _ = b.function().evaluate(x, order=1)
    if not np.all(np.isfinite(gradient)):
        gradient = None
    return float(value), gradient


def bubble_rule(b, kind=RuleKind.SPHERICAL, **params):
    """
    A rule adapted to b: spherical shells around z at scale lam, aligned with the
    H_0-unit sphere when it is an ellipsoid, with a tail matched to the bubble decay.
    """
    kind = RuleKind(kind)
    if kind == RuleKind.SPHERICAL:
        defaults = dict(
            center=b.z,
            scale=b.lam,
            shape=b.norm.radial_shape(),
            s_min=inner_log_radius(b.p),
            tail_exponent=decay_exponent(b.n, b.p),
        )
    elif kind == RuleKind.LOW_DISCREPANCY:
        defaults = dict(center=b.z, scale=b.lam, tail_exponent=decay_exponent(b.n, b.p))
    else:
        defaults = dict(center=b.z, scale=b.lam)
    return build_rule(b.n, kind, dict(defaults, **params))
