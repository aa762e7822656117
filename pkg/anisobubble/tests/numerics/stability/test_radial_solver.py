from anisobubble.numerics.anisotropy.norms import EuclideanNorm
from anisobubble.numerics.bubbles.bubble import Bubble
from anisobubble.numerics.stability.constants import RadialStatus
from anisobubble.numerics.stability.radial_solver import pohozaev_bracket, radial_shoot
from anisobubble.numerics.stability.sweep import RadialKappa
from anisobubble.tests.base_test import TestCase
from anisobubble.tests.numerics.shared import CELLS
import numpy as np


def unit_kappa(r):
    return 1.0


class RadialShootTests(TestCase):
    def test_constant_kappa_gives_the_bubble(self):
        for n, p in CELLS:
            b = Bubble(EuclideanNorm(n), p, np.zeros(n), 1.0)
            profile = radial_shoot(p, n, unit_kappa, b.center_value, r_max=20.0)
            self.assertTrue(profile.ok)
            self.assertEqual(profile.r_end, 20.0)
            points = np.zeros((len(profile.radii), n))
            points[:, 0] = profile.radii
            expected = b.function().value(points)
            self.assertArrayClose(profile.values, expected, atol=0.0, rtol=1e-5)
            self.assertRelativelyEqual(profile.bubble_scale(), 1.0, 1e-12)
            self.assertEqual(profile.kappa_id, 'unit_kappa')

    def test_scaling(self):
        # U[0, lam](0) = (c / lam)^{(n-p)/p}; the profile from that value is U[0, lam]
        n, p = 4, 2.0
        b = Bubble(EuclideanNorm(n), p, np.zeros(n), 0.5)
        profile = radial_shoot(p, n, unit_kappa, b.center_value, r_max=10.0, grid=501)
        self.assertRelativelyEqual(profile.bubble_scale(), 0.5, 1e-12)
        x = np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 3.0, 4.0, 0.0]])
        self.assertArrayClose(profile.function().value(x), b.function().value(x), atol=0.0, rtol=1e-5)

    def test_profile_function(self):
        n, p = 3, 2.0
        b = Bubble(EuclideanNorm(n), p, np.zeros(n), 1.0)
        profile = radial_shoot(p, n, unit_kappa, b.center_value, r_max=5.0, grid=1001)
        f = profile.function(center=np.array([1.0, 0.0, 0.0]))
        x = np.array([[1.5, 0.3, -0.2], [30.0, 0.0, 0.0]])
        shifted = Bubble(EuclideanNorm(n), p, np.array([1.0, 0.0, 0.0]), 1.0).function()
        self.assertArrayClose(f.value(x[:1]), shifted.value(x[:1]), atol=0.0, rtol=1e-5)
        # beyond r_end the tail only keeps the decay rate
        self.assertArrayClose(f.value(x[1:]), shifted.value(x[1:]), atol=0.0, rtol=0.05)
        self.assertArrayClose(f.gradient(x[:1]), shifted.gradient(x[:1]), atol=1e-6, rtol=1e-4)
        self.assertEqual(len(profile.to_rows()), len(profile.radii))

    def test_explicit_grid(self):
        profile = radial_shoot(2.0, 3, unit_kappa, 1.0, r_max=4.0, grid=[0.5, 1.0, 2.0, 8.0])
        self.assertEqual(profile.radii.tolist(), [0.0, 0.5, 1.0, 2.0])

    def test_arguments(self):
        with self.assertRaises(ValueError):
            radial_shoot(2.0, 3, unit_kappa, 0.0)
        with self.assertRaises(ValueError):
            radial_shoot(3.0, 3, unit_kappa, 1.0)
        with self.assertRaises(ValueError):
            radial_shoot(2.0, 3, lambda r: -1.0, 1.0)

    def test_status_values(self):
        self.assertEqual(RadialStatus('sign-change'), RadialStatus.SIGN_CHANGE)


class PohozaevTests(TestCase):
    def test_constant_kappa(self):
        b = Bubble(EuclideanNorm(3), 2.0, np.zeros(3), 1.0)
        profile = radial_shoot(2.0, 3, unit_kappa, b.center_value)
        bracket = pohozaev_bracket(profile, unit_kappa)
        self.assertEqual(bracket['bulk'], 0.0)
        self.assertLess(bracket['relative_defect'], 1e-5)

    def test_radial_kappa(self):
        kappa = RadialKappa(0.05, 1.0)
        b = Bubble(EuclideanNorm(3), 2.0, np.zeros(3), 1.0)
        profile = radial_shoot(2.0, 3, kappa, b.center_value, r_max=10.0, grid=4001)
        bracket = pohozaev_bracket(profile, kappa)
        self.assertLess(bracket['bulk'], 0.0)
        self.assertLess(bracket['relative_defect'], 1e-3)
        self.assertEqual(profile.kappa_id, 'RadialKappa(eps=0.05, width=1)')


class RadialKappaTests(TestCase):
    def test_function(self):
        kappa = RadialKappa(0.1, 2.0)
        self.assertAlmostEqual(kappa(0.0), 1.1)
        self.assertAlmostEqual(kappa(2.0), 1 + 0.1 * np.exp(-1))
        x = np.array([[2.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
        self.assertArrayClose(kappa.function(3).value(x), [kappa(2.0), kappa(0.0)])
