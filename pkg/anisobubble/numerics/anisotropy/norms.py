from anisobubble.numerics.anisotropy.constants import (
    ADMISSIBILITY_SAMPLES,
    ARMIJO_CONSTANT,
    ARMIJO_MAX_HALVINGS,
    DUAL_MAX_ITERATIONS,
    DUAL_STEP_TOLERANCE,
    DUAL_TOLERANCE,
    NEWTON_FULL_STEP_THRESHOLD,
    QUARTIC_EPSILON_MAX,
    UNIT_BALL_ANGULAR_ORDERS,
    NormFamily,
)
from anisobubble.numerics.errors import DualConvergenceError, NotUniformlyConvexError
from anisobubble.numerics.shared.sphere import sphere_rule
from anisobubble.numerics.shared.utils import as_points, outer, restore, sample_unit_vectors
from scipy.special import gamma
import logging
import numpy as np

logger = logging.getLogger(__name__)


def euclidean_ball_volume(n):
    return np.pi ** (n / 2) / gamma(n / 2 + 1)


class AnisotropicNorm:
    """
    A positively 1-homogeneous, uniformly convex norm H on R^n together with its dual
    H_0(x) = sup <x, xi> / H(xi).

    Every evaluation method accepts a single vector or an (N, n) array. Derivatives at
    the origin are returned as NaN; callers that need them defined raise instead.
    """

    family = None

    def __init__(self, n):
        if int(n) != n or n < 2:
            raise ValueError(f'The dimension specified \'{n}\' is not supported.')
        self.n = int(n)

    def __repr__(self):
        return f'{type(self).__name__}(n={self.n}, params={self.params()})'

    def __eq__(self, other):
        return isinstance(other, AnisotropicNorm) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash((self.family, self.n))

    def params(self):
        return {}

    def to_dict(self):
        return dict(
            family=self.family.value,
            n=self.n,
            params=self.params(),
        )

    def evaluate(self, xi, order=2):
        """
        Returns (H, grad H, hess H) up to the requested order.
        """
        return self._evaluate_masked(xi, order, self._primal)

    def dual_evaluate(self, x, order=2):
        """
        Returns (H_0, grad H_0, hess H_0) up to the requested order.
        """
        return self._evaluate_masked(x, order, self._dual)

    def value(self, xi):
        return self.evaluate(xi, order=0)[0]

    def gradient(self, xi):
        return self.evaluate(xi, order=1)[1]

    def hessian(self, xi):
        return self.evaluate(xi, order=2)[2]

    def dual_value(self, x):
        return self.dual_evaluate(x, order=0)[0]

    def dual_gradient(self, x):
        return self.dual_evaluate(x, order=1)[1]

    def dual_hessian(self, x):
        return self.dual_evaluate(x, order=2)[2]

    def half_square_hessian(self, xi):
        """
        Hessian of H^2 / 2, that is grad H grad H^T + H hess H.
        """
        points, single = as_points(xi, self.n)
        h, g, hh = self.evaluate(points, order=2)
        return restore(outer(g) + h[:, None, None] * hh, single)

    def unit_ball_volume(self):
        """
        Lebesgue measure of {x : H_0(x) <= 1}.
        """
        nodes, weights = sphere_rule(self.n, UNIT_BALL_ANGULAR_ORDERS.get(self.n, 8))
        radii = self.dual_value(nodes)
        return float(np.sum(weights * radii ** (-self.n)) / self.n)

    def radial_shape(self):
        """
        Linear map S such that H_0(S omega) is constant on the unit sphere when the dual
        ball is an ellipsoid, identity otherwise.
        """
        return np.eye(self.n)

    def _evaluate_masked(self, x, order, evaluator):
        points, single = as_points(x, self.n)
        count = len(points)
        values = np.zeros(count)
        grads = np.full((count, self.n), np.nan) if order >= 1 else None
        hessians = np.full((count, self.n, self.n), np.nan) if order >= 2 else None
        nonzero = np.any(points != 0, axis=1)
        if nonzero.any():
            h, g, hh = evaluator(points[nonzero], order)
            values[nonzero] = h
            if order >= 1:
                grads[nonzero] = g
            if order >= 2:
                hessians[nonzero] = hh
        return (
            restore(values, single),
            restore(grads, single) if grads is not None else None,
            restore(hessians, single) if hessians is not None else None,
        )

    def _primal(self, points, order):
        raise NotImplementedError

    def _dual(self, points, order):
        raise NotImplementedError


def _quadratic_form(points, matrix, order):
    m_xi = points @ matrix
    h = np.sqrt(np.sum(points * m_xi, axis=1))
    g = m_xi / h[:, None] if order >= 1 else None
    hh = None
    if order >= 2:
        hh = (matrix[None, :, :] - outer(g)) / h[:, None, None]
    return h, g, hh


class EuclideanNorm(AnisotropicNorm):
    family = NormFamily.EUCLIDEAN

    def _primal(self, points, order):
        h = np.linalg.norm(points, axis=1)
        g = points / h[:, None] if order >= 1 else None
        hh = None
        if order >= 2:
            hh = (np.eye(self.n)[None, :, :] - outer(g)) / h[:, None, None]
        return h, g, hh

    def _dual(self, points, order):
        return self._primal(points, order)

    def unit_ball_volume(self):
        return float(euclidean_ball_volume(self.n))


class QuadraticNorm(AnisotropicNorm):
    """
    H(xi) = sqrt(xi^T M xi) with dual H_0(x) = sqrt(x^T M^{-1} x).
    """

    family = NormFamily.QUADRATIC

    def __init__(self, matrix):
        matrix = np.array(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError('The quadratic norm needs a square matrix.')
        super().__init__(matrix.shape[0])
        if not np.allclose(matrix, matrix.T, rtol=0, atol=1e-12 * np.abs(matrix).max()):
            raise ValueError('The quadratic norm needs a symmetric matrix.')
        matrix = (matrix + matrix.T) / 2
        try:
            np.linalg.cholesky(matrix)
        except np.linalg.LinAlgError:
            raise NotUniformlyConvexError('The quadratic norm needs a positive-definite matrix.')
        self.matrix = matrix
        self.inverse = np.linalg.inv(matrix)
        self.inverse = (self.inverse + self.inverse.T) / 2

    @classmethod
    def from_diagonal(cls, diagonal, n=None):
        diagonal = list(diagonal)
        if n is not None:
            if len(diagonal) > n:
                raise ValueError(f'The diagonal has {len(diagonal)} entries for dimension {n}.')
            diagonal = diagonal + [1.0] * (n - len(diagonal))
        return cls(np.diag(diagonal))

    def params(self):
        return dict(matrix=self.matrix.tolist())

    def _primal(self, points, order):
        return _quadratic_form(points, self.matrix, order)

    def _dual(self, points, order):
        return _quadratic_form(points, self.inverse, order)

    def unit_ball_volume(self):
        return float(euclidean_ball_volume(self.n) * np.sqrt(np.linalg.det(self.matrix)))

    def radial_shape(self):
        eigenvalues, eigenvectors = np.linalg.eigh(self.matrix)
        return (eigenvectors * np.sqrt(eigenvalues)) @ eigenvectors.T


class QuarticBlendNorm(AnisotropicNorm):
    """
    H(xi) = (|xi|^4 + epsilon * sum_i xi_i^4)^(1/4).

    With strict=True the blend parameter must lie in [0, QUARTIC_EPSILON_MAX] and the
    unit ball is checked for uniform convexity on deterministic samples.
    """

    family = NormFamily.QUARTIC_BLEND

    def __init__(self, n, epsilon, strict=True):
        super().__init__(n)
        self.epsilon = float(epsilon)
        if strict:
            if not 0 <= self.epsilon <= QUARTIC_EPSILON_MAX:
                raise ValueError(
                    f'The blend parameter specified \'{epsilon}\' is not supported; '
                    f'use a value in [0, {QUARTIC_EPSILON_MAX}].'
                )
            self._check_admissible()

    def params(self):
        return dict(epsilon=self.epsilon)

    def _check_admissible(self):
        rng = np.random.default_rng(0)
        directions = sample_unit_vectors(rng, ADMISSIBILITY_SAMPLES, self.n)
        lowest = np.linalg.eigvalsh(self._half_square_hessian(directions)).min()
        if not lowest > 0:
            raise NotUniformlyConvexError(
                f'QuarticBlend with epsilon={self.epsilon} is not uniformly convex',
                minimum=float(lowest),
            )

    def _quartic(self, points, order):
        sq = points ** 2
        r2 = sq.sum(axis=1)
        q = r2 ** 2 + self.epsilon * (sq ** 2).sum(axis=1)
        dq = None
        d2q = None
        if order >= 1:
            dq = 4 * r2[:, None] * points + 4 * self.epsilon * points ** 3
        if order >= 2:
            eye = np.eye(self.n)[None, :, :]
            d2q = (
                4 * r2[:, None, None] * eye
                + 8 * outer(points)
                + 12 * self.epsilon * sq[:, :, None] * eye
            )
        return q, dq, d2q

    def _primal(self, points, order):
        q, dq, d2q = self._quartic(points, order)
        h = q ** 0.25
        g = None
        hh = None
        if order >= 1:
            g = q[:, None] ** -0.75 * dq / 4
        if order >= 2:
            hh = (
                q[:, None, None] ** -0.75 * d2q / 4
                - 3 / 16 * q[:, None, None] ** -1.75 * outer(dq)
            )
        return h, g, hh

    def _half_square(self, points):
        q, _, _ = self._quartic(points, 0)
        return np.sqrt(q) / 2

    def _half_square_gradient(self, points):
        q, dq, _ = self._quartic(points, 1)
        return dq / (4 * np.sqrt(q)[:, None])

    def _half_square_hessian(self, points):
        q, dq, d2q = self._quartic(points, 2)
        root = np.sqrt(q)[:, None, None]
        return d2q / (4 * root) - outer(dq) / (8 * root ** 3)

    def _solve_dual(self, x):
        """
        Solves grad(H^2 / 2)(y) = x, the maximizer of <x, y> - H^2(y) / 2.
        """
        y = x.copy()
        count = len(x)
        converged = np.zeros(count, dtype=bool)
        last_step = np.full(count, np.inf)
        for _ in range(DUAL_MAX_ITERATIONS):
            active = np.flatnonzero(~converged)
            if len(active) == 0:
                break
            ya = y[active]
            xa = x[active]
            residual = self._half_square_gradient(ya) - xa
            direction = -np.linalg.solve(self._half_square_hessian(ya), residual[..., None])[..., 0]
            size = np.linalg.norm(direction, axis=1) / np.linalg.norm(ya, axis=1)

            alpha = np.ones(len(active))
            search = size > NEWTON_FULL_STEP_THRESHOLD
            if search.any():
                f0 = self._half_square(ya) - np.sum(xa * ya, axis=1)
                slope = np.sum(residual * direction, axis=1)
                for _ in range(ARMIJO_MAX_HALVINGS):
                    trial = ya + alpha[:, None] * direction
                    f1 = self._half_square(trial) - np.sum(xa * trial, axis=1)
                    rejected = search & (f1 > f0 + ARMIJO_CONSTANT * alpha * slope)
                    if not rejected.any():
                        break
                    alpha[rejected] /= 2

            step = alpha[:, None] * direction
            y[active] = ya + step
            last_step[active] = np.linalg.norm(step, axis=1) / np.linalg.norm(y[active], axis=1)
            converged[active] = last_step[active] <= DUAL_TOLERANCE

        worst = float(np.max(last_step)) if count else 0.0
        if worst > DUAL_STEP_TOLERANCE:
            raise DualConvergenceError(
                f'Dual norm did not converge: relative step {worst:.3e} after '
                f'{DUAL_MAX_ITERATIONS} iterations',
                relative_step=worst,
            )
        return y

    def _dual(self, points, order):
        y = self._solve_dual(points)
        h0 = self._primal(y, 0)[0]
        g0 = None
        hh0 = None
        if order >= 1:
            g0 = y / h0[:, None]
        if order >= 2:
            # hess(H_0^2 / 2)(x) is the inverse of hess(H^2 / 2)(y).
            k = np.linalg.inv(self._half_square_hessian(y))
            k = (k + np.swapaxes(k, 1, 2)) / 2
            hh0 = (k - outer(g0)) / h0[:, None, None]
        return h0, g0, hh0


def build_norm(family, n, params=None, strict=True):
    params = params or {}
    family = NormFamily(family)
    if family == NormFamily.EUCLIDEAN:
        return EuclideanNorm(n)
    elif family == NormFamily.QUADRATIC:
        if 'matrix' in params:
            norm = QuadraticNorm(params['matrix'])
            if norm.n != n:
                raise ValueError(f'The quadratic matrix has dimension {norm.n}, expected {n}.')
            return norm
        return QuadraticNorm.from_diagonal(params.get('diagonal', []), n=n)
    return QuarticBlendNorm(n, params.get('epsilon', 0.0), strict=strict)


def norm_from_dict(spec, strict=True):
    return build_norm(spec['family'], spec['n'], spec.get('params'), strict=strict)
