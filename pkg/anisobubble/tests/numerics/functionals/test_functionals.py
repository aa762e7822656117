from anisobubble.numerics.anisotropy.norms import EuclideanNorm, QuarticBlendNorm
from anisobubble.numerics.bubbles.bubble import Bubble, bubble_rule
from anisobubble.numerics.bubbles.energies import sobolev_constant_closed_form
from anisobubble.numerics.errors import ZeroMassError
from anisobubble.numerics.functionals.deficit import (
    deficit,
    energy_count,
    kappa0,
    kappa0_diagnostics,
    normalize_kappa0,
)
from anisobubble.numerics.functionals.energy import energy_J
from anisobubble.numerics.functionals.kappa import KappaFunction, infer_kappa, kappa_precision_mask
from anisobubble.numerics.quadrature.fields import Field
from anisobubble.numerics.quadrature.functions import Constant, Gaussian
from anisobubble.tests.base_test import TestCase
from anisobubble.tests.numerics.shared import CELLS
import numpy as np


class EnergyTests(TestCase):
    def test_energy_on_bubble(self):
        for n, p in CELLS:
            norm = EuclideanNorm(n)
            b = Bubble(norm, p, np.zeros(n), 1.0)
            value = energy_J(b.function(), p, norm, bubble_rule(b))
            self.assertRelativelyEqual(value, sobolev_constant_closed_form(norm, p) ** n / n, 1e-5)

    def test_energy_count(self):
        self.assertIsNone(energy_count(0.4, 1.0))
        self.assertEqual(energy_count(0.6, 1.0), 1)
        self.assertEqual(energy_count(1.49, 1.0), 1)
        self.assertEqual(energy_count(2.1, 1.0), 2)
        self.assertIsNone(energy_count(float('nan'), 1.0))


class KappaTests(TestCase):
    def test_infer_kappa_on_bubbles(self):
        for n, p in CELLS:
            norm = QuarticBlendNorm(n, 0.5)
            b = Bubble(norm, p, np.zeros(n), 1.0)
            rule = bubble_rule(b, angular_order=4, step=0.5)
            kappa = infer_kappa(b.function(), p, norm, rule)
            kept = ~kappa.mask
            self.assertTrue(kept.any())
            self.assertArrayClose(kappa.values[kept], np.ones(kept.sum()), atol=1e-6, rtol=0)
            u = Field.sample(rule, b.function())
            self.assertAlmostEqual(kappa0(u, kappa, p), 1.0, places=7)

    def test_infer_kappa_drops_the_cancelling_tail(self):
        norm = EuclideanNorm(3)
        b = Bubble(norm, 2.0, np.zeros(3), 1.0)
        rule = bubble_rule(b)
        kappa = infer_kappa(b.function(), 2.0, norm, rule)
        kept = ~kappa.mask
        radii = np.linalg.norm(rule.nodes, axis=1)
        self.assertLess(np.max(np.abs(kappa.values[kept] - 1)), 1e-6)
        self.assertGreater(radii[kept].max(), 100.0)

        u = Field.sample(rule, b.function(), 2)
        lost = kappa_precision_mask(norm, 2.0, u.values, u.gradient_values, u.hessian_values)
        lost &= np.all(np.isfinite(u.gradient_values), axis=1)
        self.assertTrue(lost.any())
        self.assertGreater(radii[lost].min(), 1e3)
        self.assertTrue(np.all(kappa.mask[lost]))

    def test_kappa_precision_mask_keeps_well_conditioned_nodes(self):
        norm = EuclideanNorm(4)
        b = Bubble(norm, 2.0, np.zeros(4), 1.0)
        points = np.array([[0.5, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, -1.0], [1e6, 0.0, 0.0, 0.0]])
        u, g, h = b.function().evaluate(points, 2)
        self.assertEqual(kappa_precision_mask(norm, 2.0, u, g, h).tolist(), [False, False, True])

    def test_kappa_function(self):
        norm = EuclideanNorm(4)
        b = Bubble(norm, 2.0, np.zeros(4), 1.0)
        kappa = KappaFunction(3.0 ** -0.5 * b.function(), 2.0, norm)
        points = np.array([[0.5, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, -1.0]])
        self.assertArrayClose(kappa.value(points), [3.0, 3.0], rtol=1e-9)
        self.assertArrayClose(kappa.gradient(points), np.zeros((2, 4)), atol=1e-5)

    def test_infer_kappa_needs_analytic_field(self):
        norm = EuclideanNorm(3)
        b = Bubble(norm, 2.0, np.zeros(3), 1.0)
        rule = bubble_rule(b, angular_order=4, step=0.5)
        data = Field(rule, b.function().value(rule.nodes))
        with self.assertRaises(ValueError):
            infer_kappa(data, 2.0, norm)


class DeficitTests(TestCase):
    def setUp(self):
        self.norm = EuclideanNorm(3)
        self.p = 2.0
        self.bubble = Bubble(self.norm, self.p, np.zeros(3), 1.0)
        self.rule = bubble_rule(self.bubble)
        return super().setUp()

    def test_kappa0_constant(self):
        u = Field.sample(self.rule, self.bubble.function())
        self.assertAlmostEqual(kappa0(u, 1.0, self.p), 1.0)
        self.assertAlmostEqual(kappa0(u, 2.5, self.p), 2.5)

    def test_zero_mass(self):
        with self.assertRaises(ZeroMassError):
            kappa0(Constant(3, 0.0), 1.0, self.p, self.rule)

    def test_bubble_has_no_deficit(self):
        u = Field.sample(self.rule, self.bubble.function(), order=2)
        kappa = infer_kappa(u, self.p, self.norm)
        report = deficit(u, kappa, self.p, self.norm)
        self.assertLess(report.deficit, 1e-6)
        self.assertTrue(report.energy_window_ok)
        self.assertEqual(report.energy_count, 1)
        self.assertLess(report.kappa0_gap, 1e-5)

    def test_deficit_grows_with_perturbation(self):
        values = []
        for eps in [1e-3, 1e-2, 5e-2]:
            f = self.bubble.function() + eps * Gaussian(np.array([0.5, 0.0, 0.0]), 1.0)
            u = Field.sample(self.rule, f, order=2)
            kappa = infer_kappa(u, self.p, self.norm)
            values.append(deficit(u, kappa, self.p, self.norm).deficit)
        self.assertGreater(values[0], 0.0)
        self.assertTrue(values[0] < values[1] < values[2])

    def test_normalize_kappa0(self):
        u = Field.sample(self.rule, 2.0 * self.bubble.function(), order=2)
        kappa = infer_kappa(u, self.p, self.norm)
        self.assertRelativelyEqual(kappa0(u, kappa, self.p), 2.0 ** (2 - 6), 1e-6)
        u, kappa = normalize_kappa0(u, kappa, self.p)
        self.assertRelativelyEqual(kappa0(u, kappa, self.p), 1.0, 1e-12)
        self.assertRelativelyEqual(u.values.max(), self.bubble.function().value(u.rule.nodes).max(), 1e-6)

    def test_kappa0_diagnostics(self):
        diagnostics = kappa0_diagnostics(self.bubble.function(), 1.0, self.p, self.norm, self.rule)
        self.assertAlmostEqual(diagnostics['quotient'], 1.0)
        self.assertLess(diagnostics['gap'], 1e-5)
