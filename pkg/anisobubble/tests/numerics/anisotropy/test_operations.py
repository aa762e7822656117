from anisobubble.numerics.anisotropy.ellipticity import (
    cph_constant,
    ellipticity_constants,
    jacobian_ratio_bound,
    norm_equivalence_constants,
    stress_difference_constant,
)
from anisobubble.numerics.anisotropy.norms import EuclideanNorm, QuadraticNorm, QuarticBlendNorm
from anisobubble.numerics.anisotropy.operations import (
    dual_norm,
    eval_norm_with_derivatives,
    stress,
    stress_jacobian,
)
from anisobubble.numerics.errors import DerivativeAtOriginError, JacobianAtOriginError
from anisobubble.tests.base_test import TestCase
import numpy as np


class OperationsTests(TestCase):
    def test_eval_norm_with_derivatives(self):
        h, g, hh = eval_norm_with_derivatives(EuclideanNorm(2), [0.0, 2.0])
        self.assertEqual(h, 2.0)
        self.assertArrayClose(g, [0.0, 1.0])
        self.assertArrayClose(hh, [[0.5, 0.0], [0.0, 0.0]])

    def test_eval_norm_at_origin(self):
        with self.assertRaises(DerivativeAtOriginError):
            eval_norm_with_derivatives(EuclideanNorm(3), np.zeros(3))
        self.assertEqual(
            eval_norm_with_derivatives(EuclideanNorm(3), np.zeros(3), derivatives=False),
            (0.0, None, None),
        )

    def test_dual_norm(self):
        norm = QuadraticNorm.from_diagonal([4.0, 1.0])
        h0, xi = dual_norm(norm, [2.0, 0.0])
        self.assertAlmostEqual(h0, 1.0)
        # the maximizer lies on the unit sphere of H
        self.assertAlmostEqual(norm.value(xi), 1.0)
        self.assertEqual(dual_norm(norm, [0.0, 0.0]), (0.0, None))

    def test_stress_is_gradient_of_power(self):
        norm = QuarticBlendNorm(3, 0.4)
        p = 1.7
        xi = np.array([0.4, -1.1, 0.8])
        a = stress(norm, p, xi)
        step = 1e-6
        fd = np.array([
            (norm.value(xi + step * e) ** p - norm.value(xi - step * e) ** p) / (2 * step * p)
            for e in np.eye(3)
        ])
        self.assertArrayClose(a, fd, atol=1e-8, rtol=1e-7)
        self.assertArrayClose(stress(norm, p, np.zeros((1, 3))), np.zeros((1, 3)))

    def test_stress_jacobian(self):
        norm = EuclideanNorm(3)
        xi = np.array([1.0, 2.0, 2.0])
        p = 3.0
        # hess |xi|^3 / 3 = |xi| I + xi xi^T / |xi|
        expected = 3.0 * np.eye(3) + np.outer(xi, xi) / 3.0
        self.assertArrayClose(stress_jacobian(norm, p, xi), expected)
        with self.assertRaises(JacobianAtOriginError):
            stress_jacobian(norm, p, np.zeros(3))

    def test_stress_rejects_small_p(self):
        with self.assertRaises(ValueError):
            stress(EuclideanNorm(3), 1.0, np.ones(3))


class EllipticityTests(TestCase):
    def test_euclidean(self):
        est = ellipticity_constants(EuclideanNorm(4), samples=200, seed=1)
        self.assertAlmostEqual(est.lambda_H, 1.0)
        self.assertAlmostEqual(est.Lambda_H, 1.0)
        self.assertAlmostEqual(cph_constant(2.0, est), 0.0)

    def test_quadratic(self):
        est = ellipticity_constants(QuadraticNorm.from_diagonal([4.0, 1.0, 0.25]), samples=500)
        self.assertAlmostEqual(est.lambda_H, 0.25)
        self.assertAlmostEqual(est.Lambda_H, 4.0)
        rho = jacobian_ratio_bound(1.5, est)
        self.assertAlmostEqual(rho, 0.0625 * 0.5)
        self.assertAlmostEqual(cph_constant(1.5, est), (1 - rho) ** 2 / (1 + rho ** 2))

    def test_cph_in_unit_interval(self):
        est = ellipticity_constants(QuarticBlendNorm(3, 0.8), samples=300)
        for p in [1.3, 2.0, 2.7]:
            value = cph_constant(p, est)
            self.assertGreaterEqual(value, 0.0)
            self.assertLess(value, 1.0)

    def test_norm_equivalence_constants(self):
        c, C = norm_equivalence_constants(QuadraticNorm.from_diagonal([4.0, 1.0]), samples=2000)
        self.assertLessEqual(1.0, c + 1e-12)
        self.assertLessEqual(C, 2.0 + 1e-12)
        self.assertGreater(C, 1.9)

    def test_too_few_samples(self):
        with self.assertRaises(ValueError):
            ellipticity_constants(EuclideanNorm(3), samples=10)

    def test_stress_difference_constant(self):
        self.assertAlmostEqual(stress_difference_constant(EuclideanNorm(3), 2.0, samples=500), 1.0)
        # sharp value 2^{2-p}, attained at xi = -eta / 2
        value = stress_difference_constant(EuclideanNorm(3), 1.5, samples=2000)
        self.assertGreater(value, 0.9)
        self.assertLessEqual(value, 2 ** 0.5 + 1e-6)
        with self.assertRaises(ValueError):
            stress_difference_constant(EuclideanNorm(3), 2.5)
