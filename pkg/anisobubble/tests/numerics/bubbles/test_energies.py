from anisobubble.numerics.anisotropy.norms import EuclideanNorm, QuadraticNorm
from anisobubble.numerics.bubbles.bubble import Bubble, bubble_rule
from anisobubble.numerics.bubbles.energies import (
    bubble_energies,
    d1p_norm,
    sobolev_constant,
    sobolev_constant_closed_form,
    sobolev_quotient,
)
from anisobubble.numerics.bubbles.residual import weak_residual, weak_residual_terms
from anisobubble.numerics.bubbles.transforms import TransformParams, apply_transform
from anisobubble.numerics.quadrature.functions import Bump, Gaussian
from anisobubble.numerics.quadrature.rules import support_rule
from anisobubble.tests.base_test import TestCase
from anisobubble.tests.numerics.shared import CELLS, euclidean_sobolev_energy_3d, sample_norms
import mpmath
import numpy as np


def best_constant(n, p, dps=50):
    """
    Reciprocal of the sharp constant in ||u||_{p*} <= C ||grad u||_p, at dps digits.
    """
    with mpmath.workdps(dps):
        n, p = mpmath.mpf(n), mpmath.mpf(p)
        gammas = (
            mpmath.gamma(1 + n / 2) * mpmath.gamma(n)
            / (mpmath.gamma(n / p) * mpmath.gamma(1 + n - n / p))
        )
        c = (
            mpmath.pi ** mpmath.mpf(-0.5)
            * n ** (-1 / p)
            * ((p - 1) / (n - p)) ** (1 - 1 / p)
            * gammas ** (1 / n)
        )
        return float(1 / c)


class BubbleEnergiesTests(TestCase):
    def test_closed_form_euclidean(self):
        value = sobolev_constant_closed_form(EuclideanNorm(3), 2.0) ** 3
        self.assertRelativelyEqual(value, euclidean_sobolev_energy_3d(), 1e-12)

    def test_closed_form_matches_the_sharp_euclidean_constant(self):
        for n, p in [(2, 1.5), (3, 2.0), (4, 2.0), (4, 1.5), (5, 3.5)]:
            self.assertRelativelyEqual(
                sobolev_constant_closed_form(EuclideanNorm(n), p),
                best_constant(n, p),
                1e-12,
            )

    def test_closed_form_scales_with_unit_ball(self):
        # |B_1^{H_0}| doubles for diag(4, 1, 1)
        ratio = (
            sobolev_constant_closed_form(QuadraticNorm.from_diagonal([4.0, 1.0, 1.0]), 1.5) ** 3
            / sobolev_constant_closed_form(EuclideanNorm(3), 1.5) ** 3
        )
        self.assertAlmostEqual(ratio, 2.0)

    def test_gradient_energy_equals_mass(self):
        for n, p in CELLS:
            for norm in sample_norms(n)[:2]:
                b = Bubble(norm, p, np.zeros(n), 1.0)
                energies = bubble_energies(b)
                closed_form = sobolev_constant_closed_form(norm, p) ** n
                self.assertRelativelyEqual(energies.grad_energy, closed_form, 1e-5)
                self.assertRelativelyEqual(energies.mass, closed_form, 1e-5)
                self.assertLess(energies.gap / energies.mass, 1e-5)

    def test_quartic_blend(self):
        norm = sample_norms(3)[2]
        energies = bubble_energies(Bubble(norm, 2.0, np.zeros(3), 1.0))
        self.assertRelativelyEqual(
            energies.grad_energy,
            sobolev_constant_closed_form(norm, 2.0) ** 3,
            1e-5,
        )
        self.assertLess(energies.gap / energies.mass, 1e-5)

    def test_transform_invariance(self):
        norm = QuadraticNorm.from_diagonal([2.0, 0.5], n=4)
        b = Bubble(norm, 1.5, np.zeros(4), 1.0)
        moved = apply_transform(TransformParams(np.array([0.5, 0.0, 0.0, 0.0]), 2.0), b)
        before = bubble_energies(b)
        after = bubble_energies(moved, bubble_rule(moved))
        self.assertRelativelyEqual(after.grad_energy, before.grad_energy, 1e-5)
        self.assertRelativelyEqual(after.mass, before.mass, 1e-5)

    def test_dimension_mismatch(self):
        b = Bubble(EuclideanNorm(3), 2.0, np.zeros(3), 1.0)
        with self.assertRaises(ValueError):
            bubble_energies(b, bubble_rule(Bubble(EuclideanNorm(4), 2.0, np.zeros(4), 1.0)))

    def test_sobolev_constant(self):
        estimate = sobolev_constant(EuclideanNorm(4), 2.0)
        self.assertRelativelyEqual(estimate.value, estimate.closed_form, 1e-5)
        self.assertRelativelyEqual(estimate.from_mass, estimate.closed_form, 1e-5)
        self.assertRelativelyEqual(estimate.quotient, estimate.closed_form, 1e-5)

    def test_sobolev_quotient_above_constant(self):
        norm = EuclideanNorm(3)
        b = Bubble(norm, 2.0, np.zeros(3), 1.0)
        quotient = sobolev_quotient(Gaussian(np.zeros(3), 1.0), 2.0, norm, bubble_rule(b))
        self.assertGreater(quotient, sobolev_constant_closed_form(norm, 2.0))


class WeakResidualTests(TestCase):
    def test_bubble_solves_the_equation(self):
        for n, p in CELLS:
            for norm in sample_norms(n)[:2]:
                b = Bubble(norm, p, np.zeros(n), 1.0)
                phi = Bump(np.eye(n)[0], 0.5)
                terms = weak_residual_terms(b.function(), 1.0, phi, p, norm, rule=support_rule(phi))
                self.assertLess(terms.relative, 1e-5)
                self.assertGreater(abs(terms.pairing), 1e-3)

    def test_scaled_bubble_does_not(self):
        norm = EuclideanNorm(3)
        b = Bubble(norm, 2.0, np.zeros(3), 1.0)
        phi = Bump(np.array([0.5, 0.0, 0.0]), 0.8)
        terms = weak_residual_terms(1.1 * b.function(), 1.0, phi, 2.0, norm)
        self.assertGreater(terms.relative, 1e-2)
        self.assertAlmostEqual(
            weak_residual(1.1 * b.function(), 1.0, phi, 2.0, norm),
            terms.residual,
        )

    def test_kappa_scaling(self):
        # u = kappa^{-1/(p*-p)} U solves the equation with constant kappa
        norm = EuclideanNorm(4)
        p = 2.0
        kappa = 3.0
        b = Bubble(norm, p, np.zeros(4), 1.0)
        phi = Bump(np.array([0.0, 0.7, 0.0, 0.0]), 0.5)
        terms = weak_residual_terms(kappa ** (-1 / (4 - 2)) * b.function(), kappa, phi, p, norm)
        self.assertLess(terms.relative, 1e-5)

    def test_needs_a_rule(self):
        norm = EuclideanNorm(3)
        b = Bubble(norm, 2.0, np.zeros(3), 1.0)
        with self.assertRaises(ValueError):
            weak_residual_terms(b.function(), 1.0, Gaussian(np.zeros(3), 1.0), 2.0, norm)

    def test_d1p_norm(self):
        norm = EuclideanNorm(3)
        phi = Gaussian(np.zeros(3), 1.0)
        b = Bubble(norm, 2.0, np.zeros(3), 1.0)
        # int |grad exp(-|x|^2)|^2 = 4 int |x|^2 exp(-2|x|^2) dx = 3 (pi / 2)^(3/2)
        value = d1p_norm(phi, 2.0, norm, bubble_rule(b)) ** 2
        self.assertRelativelyEqual(value, 3 * (np.pi / 2) ** 1.5, 1e-5)
