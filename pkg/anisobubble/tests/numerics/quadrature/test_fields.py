from anisobubble.numerics.quadrature.constants import FieldSource, RuleKind
from anisobubble.numerics.quadrature.fields import Field, as_field
from anisobubble.numerics.quadrature.functions import Bump, Clipped, Constant, Gaussian, Transformed
from anisobubble.numerics.quadrature.integrate import integrate
from anisobubble.numerics.quadrature.rules import build_rule
from anisobubble.tests.base_test import TestCase
import math
import numpy as np


class FieldTests(TestCase):
    def setUp(self):
        self.rule = build_rule(3, RuleKind.SPHERICAL, dict(angular_order=6, step=0.4))
        return super().setUp()

    def test_sample(self):
        field = Field.sample(self.rule, Gaussian(np.zeros(3), 1.0), order=2)
        self.assertEqual(field.source, FieldSource.ANALYTIC)
        self.assertEqual(field.order, 2)
        self.assertEqual(len(field.excluded_nodes), 0)
        value, error = integrate(self.rule, field)
        self.assertLessEqual(abs(value - math.pi ** 1.5), error)
        self.assertRelativelyEqual(value, math.pi ** 1.5, 1e-3)

    def test_require_and_data_fields(self):
        field = Field.sample(self.rule, Gaussian(np.zeros(3), 1.0))
        self.assertEqual(field.require(1).order, 1)
        data = Field(self.rule, field.values)
        self.assertEqual(data.source, FieldSource.DATA)
        with self.assertRaises(ValueError):
            data.require(1)
        with self.assertRaises(ValueError):
            data.resample(build_rule(3, RuleKind.SPHERICAL))

    def test_scaled(self):
        field = Field.sample(self.rule, Gaussian(np.zeros(3), 1.0), order=1)
        scaled = field.scaled(2.0)
        self.assertArrayClose(scaled.values, 2 * field.values)
        self.assertArrayClose(scaled.gradient_values, 2 * field.gradient_values)
        self.assertArrayClose(scaled.function.value(np.zeros(3)), 2.0)

    def test_non_finite_samples_are_excluded(self):
        rule = build_rule(3, RuleKind.LOCAL_BALL, dict(radius=1.0, radial_order=8, angular_order=4))
        field = Field(rule, np.ones(len(rule)), excluded_nodes=[2, 2, 5])
        self.assertEqual(field.excluded_nodes.tolist(), [2, 5])
        self.assertEqual(field.mask.sum(), 2)

    def test_as_field_constant(self):
        field = as_field(2.5, self.rule)
        self.assertTrue(np.all(field.values == 2.5))
        with self.assertRaises(ValueError):
            as_field(Gaussian(np.zeros(3), 1.0))


class FunctionAlgebraTests(TestCase):
    def test_linear_combination(self):
        f = 2 * Gaussian(np.zeros(2), 1.0) + 1.0
        x = np.array([0.3, 0.4])
        self.assertAlmostEqual(f.value(x), 2 * math.exp(-0.25) + 1.0)
        self.assertArrayClose(f.gradient(x), -4 * x * math.exp(-0.25))

    def test_transformed(self):
        g = Gaussian(np.zeros(2), 1.0)
        t = Transformed(g, np.array([1.0, 0.0]), 2.0, 0.5)
        x = np.array([1.5, 0.0])
        self.assertAlmostEqual(t.value(x), math.sqrt(2) * math.exp(-1.0))
        self.assertArrayClose(t.gradient(x), math.sqrt(2) * 2 * np.array([-2.0, 0.0]) * math.exp(-1.0))

    def test_bump_support_and_hessian(self):
        bump = Bump(np.zeros(2), 1.0)
        self.assertEqual(bump.value(np.array([1.0, 0.0])), 0.0)
        self.assertAlmostEqual(bump.value(np.zeros(2)), 1.0)
        x = np.array([0.2, -0.3])
        step = 1e-5
        fd = np.array([
            (bump.gradient(x + step * e) - bump.gradient(x - step * e)) / (2 * step)
            for e in np.eye(2)
        ])
        self.assertArrayClose(bump.hessian(x), fd, atol=1e-7, rtol=1e-6)

    def test_clipped(self):
        f = Clipped(Constant(2, -1.0) + Gaussian(np.zeros(2), 1.0, amplitude=2.0))
        self.assertAlmostEqual(f.value(np.zeros(2)), 1.0)
        self.assertEqual(f.value(np.array([3.0, 0.0])), 0.0)
        self.assertArrayClose(f.gradient(np.array([3.0, 0.0])), np.zeros(2))
