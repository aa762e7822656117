from anisobubble.numerics.anisotropy.norms import EuclideanNorm, QuadraticNorm, QuarticBlendNorm
from anisobubble.numerics.anisotropy.operations import stress_field
from anisobubble.numerics.bubbles.bubble import Bubble, bubble_rule
from anisobubble.numerics.pfunction.frame import VTransformFunction, pfunction_values
from anisobubble.numerics.quadrature.fields import Field
from anisobubble.numerics.quadrature.functions import Bump, Gaussian
from anisobubble.numerics.stability.approximants import (
    approximant_offset,
    first_approximant,
    maximum_point,
    proof_bubble_report,
    proof_driven_bubble,
    proof_scale,
    second_approximant,
)
from anisobubble.numerics.stability.decay import decay_check
from anisobubble.tests.base_test import TestCase
from anisobubble.tests.numerics.shared import CELLS
import math
import numpy as np


class ApproximantTests(TestCase):
    def test_proof_scale_on_euclidean_bubble(self):
        # P = 2 sqrt(3) on U[0, 1] in R^3 with p = 2
        self.assertAlmostEqual(proof_scale(3, 2.0, 2 * math.sqrt(3)), 1.0)
        with self.assertRaises(ValueError):
            proof_scale(3, 2.0, 0.0)

    def test_stress_of_first_approximant(self):
        for n, p in CELLS:
            norm = QuadraticNorm.from_diagonal([2.0, 0.5], n=n)
            x0 = np.linspace(0.1, 0.4, n)
            q = first_approximant(norm, p, x0, 1.5, 3.0)
            points = x0 + np.array([np.linspace(-1.0, 1.0, n), np.linspace(0.5, 0.2, n)])
            self.assertArrayClose(
                stress_field(norm, p, q.gradient(points)),
                3.0 / n * (points - x0),
                atol=1e-9,
                rtol=1e-9,
            )

    def test_approximants_differ_by_the_offset(self):
        for n, p in CELLS:
            norm = QuadraticNorm.from_diagonal([2.0, 0.5], n=n)
            x0 = np.zeros(n)
            first = first_approximant(norm, p, x0, 0.7, 2.5)
            second = second_approximant(norm, p, x0, 2.5)
            points = np.array([np.full(n, 0.3), np.linspace(-2.0, 1.0, n)])
            self.assertArrayClose(
                first.value(points) - second.value(points),
                np.full(2, approximant_offset(n, p, 0.7, 2.5)),
                atol=1e-10,
                rtol=1e-10,
            )

    def test_second_approximant_is_a_bubble(self):
        norm = EuclideanNorm(4)
        p = 1.5
        x0 = np.array([0.2, 0.0, -0.1, 0.0])
        second = second_approximant(norm, p, x0, 1.7)
        bubble = Bubble(norm, p, x0, proof_scale(4, p, 1.7))
        points = np.array([[0.5, 0.5, 0.0, 0.0], [2.0, -1.0, 0.3, 0.0]])
        self.assertArrayClose(
            second.value(points),
            VTransformFunction(bubble.function(), p).value(points),
            rtol=1e-10,
        )


class ProofDrivenBubbleTests(TestCase):
    def off_grid_center(self, n):
        z = np.zeros(n)
        z[:3] = [0.3, -0.17, 0.05][:n]
        return z

    def test_recovers_bubbles(self):
        for n, p in CELLS:
            for norm in [EuclideanNorm(n), QuadraticNorm.from_diagonal([2.0, 0.5], n=n), QuarticBlendNorm(n, 0.5)]:
                truth = Bubble(norm, p, self.off_grid_center(n), 0.7)
                rule = bubble_rule(Bubble(norm, p, np.zeros(n), 0.7))
                report = proof_bubble_report(truth.function(), p, norm, 0.25, rule)
                self.assertLess(np.linalg.norm(report.bubble.z - truth.z), 1e-6)
                self.assertLess(abs(math.log(report.bubble.lam / truth.lam)), 1e-6)
                self.assertLess(abs(report.offset), 1e-6)

    def test_maximum_point_solves_for_the_stationary_point(self):
        n, p = 4, 1.5
        norm = QuadraticNorm.from_diagonal([2.0, 0.5], n=n)
        truth = Bubble(norm, p, self.off_grid_center(n), 1.3)
        u = Field.sample(bubble_rule(Bubble(norm, p, np.zeros(n), 1.0)), truth.function())
        x0, _ = maximum_point(u, p, norm)
        self.assertArrayClose(x0, truth.z, atol=1e-9, rtol=0)

    def test_converges_as_the_ball_shrinks(self):
        norm = EuclideanNorm(3)
        p = 2.0
        truth = Bubble(norm, p, np.zeros(3), 1.0)
        rule = bubble_rule(truth)
        u = truth.function() + 0.01 * Gaussian(np.array([1.0, 0.0, 0.0]), 1.0)
        errors = []
        for t in [0.25, 0.125]:
            report = proof_bubble_report(u, p, norm, t, rule)
            limit = proof_scale(3, p, float(pfunction_values(u, p, norm, report.x0[None, :])[0]))
            errors.append(abs(math.log(report.bubble.lam / limit)))
        self.assertLess(errors[1], errors[0])

    def test_proof_driven_bubble(self):
        norm = EuclideanNorm(3)
        truth = Bubble(norm, 2.0, np.zeros(3), 2.0)
        bubble = proof_driven_bubble(truth.function(), 2.0, norm, rule=bubble_rule(truth))
        self.assertRelativelyEqual(bubble.lam, 2.0, 1e-6)

    def test_arguments(self):
        norm = EuclideanNorm(3)
        truth = Bubble(norm, 2.0, np.zeros(3), 1.0)
        rule = bubble_rule(truth)
        with self.assertRaises(ValueError):
            proof_bubble_report(truth.function(), 2.0, norm, 1.5, rule)
        with self.assertRaises(ValueError):
            proof_bubble_report(Field(rule, truth.function().value(rule.nodes)), 2.0, norm)


class DecayTests(TestCase):
    def test_bubble_conforms(self):
        for n, p in CELLS:
            b = Bubble(EuclideanNorm(n), p, np.zeros(n), 1.0)
            report = decay_check(Field.sample(bubble_rule(b), b.function(), 1), p, b.norm)
            self.assertTrue(report.conforming)
            self.assertGreater(report.c0, 0.0)
            self.assertLess(report.tightness, 1e3)
            self.assertIsNotNone(report.C1)
            self.assertEqual(report.value_exponent, (n - p) / (p - 1))

    def test_compact_support_does_not(self):
        b = Bubble(EuclideanNorm(3), 2.0, np.zeros(3), 1.0)
        rule = bubble_rule(b)
        report = decay_check(Field.sample(rule, Bump(np.zeros(3), 1.0), 1), 2.0, b.norm)
        self.assertFalse(report.conforming)
        self.assertEqual(report.c0, 0.0)
        self.assertGreaterEqual(np.linalg.norm(report.worst_point), 1.0)
        self.assertEqual(report.to_dict()['tightness'], float('inf'))
