from anisobubble.numerics.anisotropy.norms import EuclideanNorm, QuadraticNorm
from anisobubble.numerics.bubbles.bubble import Bubble, bubble_rule
from anisobubble.numerics.errors import CriticalSetTooLargeError
from anisobubble.numerics.functionals.kappa import KappaFunction
from anisobubble.numerics.pfunction.frame import VTransformFunction, build_pframe, pfunction_values
from anisobubble.numerics.quadrature.fields import Field
from anisobubble.numerics.quadrature.functions import Bump, Constant, Gaussian
from anisobubble.numerics.quadrature.rules import support_rule
from anisobubble.tests.base_test import TestCase
from anisobubble.tests.numerics.shared import CELLS
import math
import numpy as np


class VTransformTests(TestCase):
    def test_bubble_becomes_paraboloid(self):
        # v = u^{-2} = (1 + |x|^2) / sqrt(3) for n = 3, p = 2
        b = Bubble(EuclideanNorm(3), 2.0, np.zeros(3), 1.0)
        v = VTransformFunction(b.function(), 2.0)
        x = np.array([[0.3, -0.4, 1.2], [2.0, 0.0, 0.0]])
        r2 = np.sum(x ** 2, axis=1)
        self.assertArrayClose(v.value(x), (1 + r2) / math.sqrt(3))
        self.assertArrayClose(v.gradient(x), 2 * x / math.sqrt(3))
        self.assertArrayClose(v.hessian(x), np.broadcast_to(2 * np.eye(3) / math.sqrt(3), (2, 3, 3)))

    def test_non_positive_values(self):
        v = VTransformFunction(Gaussian(np.zeros(3), 1.0, amplitude=-1.0), 2.0)
        self.assertTrue(np.all(np.isnan(v.value(np.zeros((2, 3))))))


class PFrameTests(TestCase):
    def test_p_is_constant_on_bubbles(self):
        for n, p in CELLS:
            norm = QuadraticNorm.from_diagonal([2.0, 0.5], n=n)
            b = Bubble(norm, p, np.zeros(n), 1.0)
            frame = build_pframe(b.function(), 1.0, p, norm, rule=bubble_rule(b, angular_order=4, step=0.5))
            P = frame.P.values[frame.keep]
            self.assertLess(np.std(P) / np.mean(P), 1e-8)
            self.assertLess(len(frame.excluded_nodes), 0.01 * len(frame))
            self.assertArrayClose(frame.R.values[frame.keep], np.zeros(frame.keep.sum()))

    def test_p_value_on_euclidean_bubble(self):
        # P = (3/2 * 4r^2/3 + 2) / ((1 + r^2) / sqrt(3)) = 2 sqrt(3)
        b = Bubble(EuclideanNorm(3), 2.0, np.zeros(3), 1.0)
        x = np.array([[0.5, 0.0, 0.0], [1.0, -2.0, 3.0]])
        self.assertArrayClose(pfunction_values(b.function(), 2.0, b.norm, x), [2 * math.sqrt(3)] * 2)

    def test_pfunction_values_match_frame(self):
        norm = EuclideanNorm(4)
        f = Bubble(norm, 1.5, np.zeros(4), 1.0).function() + 0.05 * Gaussian(np.array([0.5, 0.0, 0.0, 0.0]), 1.0)
        phi = Bump(np.array([1.0, 0.0, 0.0, 0.0]), 0.5)
        frame = build_pframe(f, KappaFunction(f, 1.5, norm), 1.5, norm, rule=support_rule(phi))
        nodes = frame.rule.nodes[frame.keep]
        self.assertArrayClose(
            frame.P.values[frame.keep],
            pfunction_values(f, 1.5, norm, nodes),
            atol=1e-9,
            rtol=1e-9,
        )

    def test_frame_on_a_field(self):
        norm = EuclideanNorm(3)
        b = Bubble(norm, 2.0, np.zeros(3), 1.0)
        rule = bubble_rule(b, angular_order=4, step=0.5)
        u = Field.sample(rule, b.function(), order=2)
        frame = build_pframe(u, 1.0, 2.0, norm)
        self.assertIs(frame.rule, rule)
        self.assertEqual(frame.to_dict()['size'], len(rule))
        with self.assertRaises(ValueError):
            build_pframe(Field(rule, u.values), 1.0, 2.0, norm)

    def test_evaluate_matches_nodes(self):
        norm = EuclideanNorm(3)
        b = Bubble(norm, 2.0, np.zeros(3), 1.0)
        frame = build_pframe(b.function(), 1.0, 2.0, norm, rule=bubble_rule(b, angular_order=4, step=0.5))
        nodes = frame.rule.nodes[frame.keep][:10]
        self.assertArrayClose(frame.evaluate(nodes)['P'], frame.P.values[frame.keep][:10])

    def test_flat_function_is_rejected(self):
        norm = EuclideanNorm(3)
        phi = Bump(np.zeros(3), 1.0)
        with self.assertRaises(CriticalSetTooLargeError):
            build_pframe(Constant(3, 2.0), 1.0, 2.0, norm, rule=support_rule(phi))
