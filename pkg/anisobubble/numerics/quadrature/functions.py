from anisobubble.numerics.shared.utils import as_points, outer, restore
import numpy as np


class AnalyticFunction:
    """
    A scalar function on R^n with analytic derivatives up to second order.

    Subclasses implement _evaluate(points, order) on an (N, n) array and return
    (values, gradients or None, hessians or None). Points where a derivative is
    undefined carry NaN.
    """

    n = None

    def __call__(self, x):
        return self.value(x)

    def __add__(self, other):
        return LinearCombination([(1.0, self), (1.0, _as_function(other, self.n))])

    __radd__ = __add__

    def __sub__(self, other):
        return LinearCombination([(1.0, self), (-1.0, _as_function(other, self.n))])

    def __mul__(self, coefficient):
        if not np.isscalar(coefficient):
            return NotImplemented
        return LinearCombination([(float(coefficient), self)])

    __rmul__ = __mul__

    def __neg__(self):
        return LinearCombination([(-1.0, self)])

    def evaluate(self, x, order=0):
        points, single = as_points(x, self.n)
        values, grads, hessians = self._evaluate(points, order)
        return (
            restore(values, single),
            restore(grads, single) if order >= 1 else None,
            restore(hessians, single) if order >= 2 else None,
        )

    def value(self, x):
        return self.evaluate(x, 0)[0]

    def gradient(self, x):
        return self.evaluate(x, 1)[1]

    def hessian(self, x):
        return self.evaluate(x, 2)[2]

    def identifier(self):
        return type(self).__name__

    def _evaluate(self, points, order):
        raise NotImplementedError


def _as_function(other, n):
    if isinstance(other, AnalyticFunction):
        return other
    if np.isscalar(other):
        return Constant(n, other)
    raise TypeError(f'Cannot combine an analytic function with {type(other).__name__}.')


class Constant(AnalyticFunction):
    def __init__(self, n, value):
        self.n = int(n)
        self.constant = float(value)

    def identifier(self):
        return f'Constant({self.constant:g})'

    def _evaluate(self, points, order):
        count = len(points)
        return (
            np.full(count, self.constant),
            np.zeros((count, self.n)) if order >= 1 else None,
            np.zeros((count, self.n, self.n)) if order >= 2 else None,
        )


class Bump(AnalyticFunction):
    """
    phi(x) = amplitude * exp(1 - 1 / (1 - |x - c|^2 / r^2)) on |x - c| < r, zero outside.
    """

    def __init__(self, center, radius, amplitude=1.0):
        self.center = np.asarray(center, dtype=float)
        self.n = len(self.center)
        if not radius > 0:
            raise ValueError(f'The bump radius specified \'{radius}\' is not supported.')
        self.radius = float(radius)
        self.amplitude = float(amplitude)

    @property
    def support(self):
        return self.center, self.radius

    def identifier(self):
        return f'Bump(center={self.center.tolist()}, radius={self.radius:g}, amplitude={self.amplitude:g})'

    def _evaluate(self, points, order):
        count = len(points)
        diff = points - self.center
        s = np.sum(diff ** 2, axis=1) / self.radius ** 2
        inside = s < 1
        values = np.zeros(count)
        gap = 1 - s[inside]
        values[inside] = self.amplitude * np.exp(1 - 1 / gap)
        grads = None
        hessians = None
        if order >= 1:
            grads = np.zeros((count, self.n))
            d1 = -values[inside] / gap ** 2
            ds = 2 * diff[inside] / self.radius ** 2
            grads[inside] = d1[:, None] * ds
        if order >= 2:
            hessians = np.zeros((count, self.n, self.n))
            d2 = values[inside] * (1 / gap ** 4 - 2 / gap ** 3)
            hessians[inside] = (
                d2[:, None, None] * outer(ds)
                + (2 * d1 / self.radius ** 2)[:, None, None] * np.eye(self.n)[None, :, :]
            )
        return values, grads, hessians


class Gaussian(AnalyticFunction):
    def __init__(self, center, width, amplitude=1.0):
        self.center = np.asarray(center, dtype=float)
        self.n = len(self.center)
        if not width > 0:
            raise ValueError(f'The Gaussian width specified \'{width}\' is not supported.')
        self.width = float(width)
        self.amplitude = float(amplitude)

    def identifier(self):
        return f'Gaussian(center={self.center.tolist()}, width={self.width:g}, amplitude={self.amplitude:g})'

    def _evaluate(self, points, order):
        diff = points - self.center
        w2 = self.width ** 2
        values = self.amplitude * np.exp(-np.sum(diff ** 2, axis=1) / w2)
        grads = -2 * diff / w2 * values[:, None] if order >= 1 else None
        hessians = None
        if order >= 2:
            hessians = values[:, None, None] * (
                4 * outer(diff) / w2 ** 2 - 2 * np.eye(self.n)[None, :, :] / w2
            )
        return values, grads, hessians


class LinearCombination(AnalyticFunction):
    def __init__(self, terms):
        terms = [(float(c), f) for c, f in terms]
        if not terms:
            raise ValueError('A linear combination needs at least one term.')
        dimensions = set(f.n for _, f in terms)
        if len(dimensions) != 1:
            raise ValueError(f'Cannot combine functions of dimensions {sorted(dimensions)}.')
        self.terms = terms
        self.n = dimensions.pop()

    def identifier(self):
        return ' + '.join(f'{c:g}*{f.identifier()}' for c, f in self.terms)

    def _evaluate(self, points, order):
        values = 0
        grads = 0 if order >= 1 else None
        hessians = 0 if order >= 2 else None
        for coefficient, function in self.terms:
            v, g, h = function._evaluate(points, order)
            values = values + coefficient * v
            if order >= 1:
                grads = grads + coefficient * g
            if order >= 2:
                hessians = hessians + coefficient * h
        return values, grads, hessians


class Transformed(AnalyticFunction):
    """
    x -> lam^exponent * f(lam * (x - z)).
    """

    def __init__(self, function, z, lam, exponent):
        if not lam > 0:
            raise ValueError(f'The scale specified \'{lam}\' is not supported.')
        self.function = function
        self.n = function.n
        self.z = np.asarray(z, dtype=float)
        self.lam = float(lam)
        self.exponent = float(exponent)

    def identifier(self):
        return (
            f'Transformed({self.function.identifier()}, z={self.z.tolist()}, '
            f'lam={self.lam:g}, exponent={self.exponent:g})'
        )

    def _evaluate(self, points, order):
        v, g, h = self.function._evaluate(self.lam * (points - self.z), order)
        factor = self.lam ** self.exponent
        return (
            factor * v,
            factor * self.lam * g if order >= 1 else None,
            factor * self.lam ** 2 * h if order >= 2 else None,
        )


class Clipped(AnalyticFunction):
    """
    max(f, 0) with derivatives set to zero where f <= 0.
    """

    def __init__(self, function):
        self.function = function
        self.n = function.n

    def identifier(self):
        return f'Clipped({self.function.identifier()})'

    def _evaluate(self, points, order):
        v, g, h = self.function._evaluate(points, order)
        negative = v <= 0
        v = np.where(negative, 0.0, v)
        if order >= 1:
            g = np.where(negative[:, None], 0.0, g)
        if order >= 2:
            h = np.where(negative[:, None, None], 0.0, h)
        return v, g, h
