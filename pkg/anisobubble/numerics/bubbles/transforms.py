from anisobubble.numerics.bubbles.bubble import Bubble
from anisobubble.numerics.bubbles.constants import bubble_exponent
from anisobubble.numerics.quadrature.fields import Field
from anisobubble.numerics.quadrature.functions import AnalyticFunction, Transformed
from dataclasses import dataclass
import numpy as np


@dataclass(frozen=True)
class TransformParams:
    """
    (T_{z,lam} phi)(x) = lam^w phi(lam (x - z)) with weight w = (n - p) / p for
    solutions and w = 0 for coefficients such as kappa.
    """

    z: tuple
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f'The scale specified \'{self.lam}\' is not supported.')
        object.__setattr__(self, 'z', tuple(float(c) for c in np.ravel(self.z)))
        object.__setattr__(self, 'lam', float(self.lam))

    @property
    def center(self):
        return np.asarray(self.z)

    def inverse(self):
        """
        T_{-z lam, 1/lam}, the inverse of T_{z, lam}.
        """
        return TransformParams(tuple(-self.lam * self.center), 1 / self.lam)

    def to_dict(self):
        return dict(lam=self.lam, z=list(self.z))


def _weight(n, p, exponent):
    if exponent is not None:
        return float(exponent)
    if p is None:
        raise ValueError('Transforming a field needs either p or an explicit exponent.')
    return bubble_exponent(n, p)


def apply_transform(t, f, p=None, exponent=None):
    """
    Applies T_{z,lam} to a Bubble, an AnalyticFunction or a Field.

    Bubbles map to bubbles: T_{z,lam} U_p[z', lam'] = U_p[z + z' / lam, lam' / lam].
    Fields are pushed onto rule.transformed(z, lam), where the new node values are the
    old ones times lam^w (derivatives times lam^(w+1), lam^(w+2)); analytic fields keep
    a transformed closure so that they can be resampled.
    """
    if isinstance(f, Bubble):
        if len(t.z) != f.n:
            raise ValueError(f'The transform center must be a vector in R^{f.n}.')
        return Bubble(f.norm, f.p, t.center + f.z / t.lam, f.lam / t.lam)

    if isinstance(f, AnalyticFunction):
        return Transformed(f, t.center, t.lam, _weight(f.n, p, exponent))

    if isinstance(f, Field):
        w = _weight(f.rule.n, p, exponent)
        factor = t.lam ** w
        function = None
        if f.function is not None:
            function = Transformed(f.function, t.center, t.lam, w)
        return Field(
            f.rule.transformed(t.center, t.lam),
            factor * f.values,
            gradient_values=None if f.gradient_values is None else factor * t.lam * f.gradient_values,
            hessian_values=None if f.hessian_values is None else factor * t.lam ** 2 * f.hessian_values,
            function=function,
            excluded_nodes=f.excluded_nodes,
        )

    raise TypeError(f'Cannot transform an object of type {type(f).__name__}.')
