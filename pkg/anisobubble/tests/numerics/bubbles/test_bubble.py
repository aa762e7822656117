from anisobubble.numerics.anisotropy.norms import EuclideanNorm, QuadraticNorm, QuarticBlendNorm
from anisobubble.numerics.bubbles.bubble import Bubble, bubble_eval, bubble_rule
from anisobubble.numerics.bubbles.constants import (
    bubble_constant,
    critical_exponent,
    inner_log_radius,
    pfunction_constant,
    v_exponent,
)
from anisobubble.numerics.bubbles.transforms import TransformParams, apply_transform
from anisobubble.numerics.quadrature.constants import RuleKind
from anisobubble.numerics.quadrature.fields import Field
from anisobubble.tests.base_test import TestCase
from anisobubble.tests.numerics.shared import CELLS
import math
import numpy as np


class ConstantsTests(TestCase):
    def test_exponents(self):
        self.assertEqual(critical_exponent(3, 2.0), 6.0)
        self.assertEqual(critical_exponent(4, 2.0), 4.0)
        self.assertAlmostEqual(bubble_constant(3, 2.0), math.sqrt(3))
        self.assertAlmostEqual(pfunction_constant(3, 2.0), 2.0)
        self.assertAlmostEqual(v_exponent(4, 1.5), -1.5 / 2.5)

    def test_invalid_exponents(self):
        with self.assertRaises(ValueError):
            critical_exponent(3, 3.0)
        with self.assertRaises(ValueError):
            critical_exponent(3, 1.0)

    def test_inner_log_radius(self):
        # |grad U| ~ rho at p = 2 reaches the gradient floor just inside the default s_min
        self.assertAlmostEqual(inner_log_radius(2.0), math.log(1e-5))
        self.assertEqual(inner_log_radius(3.0), -12.0)
        self.assertGreater(inner_log_radius(1.3), -12.0)


class BubbleTests(TestCase):
    def test_center_value(self):
        for n, p in CELLS:
            b = Bubble(EuclideanNorm(n), p, np.zeros(n), 2.0)
            value, gradient = bubble_eval(b, np.zeros(n))
            self.assertAlmostEqual(value, b.center_value)
            self.assertAlmostEqual(value, (bubble_constant(n, p) / 2.0) ** ((n - p) / p))
            self.assertIsNone(gradient)

    def test_euclidean_p2_profile(self):
        # U[0, 1](x) = (sqrt(3) / (1 + |x|^2))^(1/2) in R^3
        b = Bubble(EuclideanNorm(3), 2.0, np.zeros(3), 1.0)
        x = np.array([0.3, -0.4, 1.2])
        r2 = float(x @ x)
        value, gradient = bubble_eval(b, x)
        self.assertAlmostEqual(value, (math.sqrt(3) / (1 + r2)) ** 0.5)
        self.assertArrayClose(gradient, -value * x / (1 + r2))

    def test_gradient_and_hessian_match_differences(self):
        norm = QuarticBlendNorm(3, 0.5)
        b = Bubble(norm, 1.7, np.array([0.2, 0.0, -0.1]), 0.8)
        f = b.function()
        x = np.array([[0.9, -0.5, 0.4]])
        step = 1e-6
        eye = np.eye(3)
        fd_grad = np.array([(f.value(x + step * e) - f.value(x - step * e)) / (2 * step) for e in eye]).T
        fd_hess = np.stack(
            [(f.gradient(x + step * e) - f.gradient(x - step * e)) / (2 * step) for e in eye],
            axis=-1,
        )
        self.assertArrayClose(f.gradient(x), fd_grad, atol=1e-7, rtol=1e-6)
        self.assertArrayClose(f.hessian(x), fd_hess, atol=1e-6, rtol=1e-5)

    def test_rejects_bad_parameters(self):
        norm = EuclideanNorm(3)
        with self.assertRaises(ValueError):
            Bubble(norm, 2.0, np.zeros(2), 1.0)
        with self.assertRaises(ValueError):
            Bubble(norm, 2.0, np.zeros(3), 0.0)
        with self.assertRaises(ValueError):
            Bubble(norm, 3.5, np.zeros(3), 1.0)

    def test_to_dict(self):
        b = Bubble(QuadraticNorm.from_diagonal([2.0], n=3), 2.0, np.array([1.0, 0.0, 0.0]), 0.5)
        again = Bubble.from_dict(b.to_dict())
        self.assertEqual(again.norm, b.norm)
        self.assertArrayClose(again.z, b.z)
        self.assertEqual(again.lam, 0.5)

    def test_bubble_rule_alignment(self):
        norm = QuadraticNorm.from_diagonal([4.0, 1.0, 1.0])
        b = Bubble(norm, 2.0, np.array([1.0, 2.0, 3.0]), 0.5)
        rule = bubble_rule(b)
        self.assertArrayClose(rule.center, b.z)
        # nodes of one shell share the same H_0 distance from z
        count = len(rule) // len(np.unique(np.round(np.log(norm.dual_value(rule.nodes - b.z)), 8)))
        self.assertGreater(count, 1)
        ball = bubble_rule(b, RuleKind.LOCAL_BALL, radius=0.5)
        self.assertEqual(ball.kind, RuleKind.LOCAL_BALL)


class TransformTests(TestCase):
    def test_bubble_to_bubble(self):
        norm = QuarticBlendNorm(3, 0.3)
        b = Bubble(norm, 2.0, np.array([1.0, 0.0, 0.0]), 2.0)
        t = TransformParams(np.array([0.5, -1.0, 0.0]), 4.0)
        moved = apply_transform(t, b)
        self.assertArrayClose(moved.z, [0.75, -1.0, 0.0])
        self.assertAlmostEqual(moved.lam, 0.5)
        x = np.array([[0.3, 0.2, -0.4], [2.0, 1.0, 0.5]])
        transformed = apply_transform(t, b.function(), p=2.0)
        self.assertArrayClose(transformed.value(x), moved.function().value(x), rtol=1e-10)

    def test_inverse(self):
        t = TransformParams((1.0, 2.0), 2.0)
        b = Bubble(EuclideanNorm(2), 1.5, np.array([0.3, 0.1]), 1.5)
        back = apply_transform(t.inverse(), apply_transform(t, b))
        self.assertArrayClose(back.z, b.z)
        self.assertAlmostEqual(back.lam, b.lam)

    def test_field_transform(self):
        b = Bubble(EuclideanNorm(3), 2.0, np.zeros(3), 1.0)
        field = Field.sample(bubble_rule(b, angular_order=4, step=0.5), b.function(), order=1)
        t = TransformParams(np.array([1.0, 0.0, 0.0]), 2.0)
        moved = apply_transform(t, field, p=2.0)
        expected = apply_transform(t, b).function().value(moved.rule.nodes)
        self.assertArrayClose(moved.values, expected, rtol=1e-10)
        with self.assertRaises(ValueError):
            apply_transform(t, field)

    def test_invalid_scale(self):
        with self.assertRaises(ValueError):
            TransformParams((0.0, 0.0), -1.0)
