from anisobubble.numerics.shared.differences import central_divergence, central_gradient
from anisobubble.numerics.shared.hash import deep_merge_dict, dig, group_by, replace_nan_values
from anisobubble.numerics.shared.multi import evaluate_in_blocks, execute_parallel
from anisobubble.numerics.shared.sphere import sphere_rule
from anisobubble.numerics.shared.utils import critical_set, sample_unit_vectors
from anisobubble.tests.base_test import TestCase
from scipy.special import gamma
import math
import numpy as np


class SharedTests(TestCase):
    def test_dig(self):
        obj = dict(
            matrix=dict(n=[3, 4], p=[2.0, 1.5]),
            norm=dict(family='euclidean'),
        )
        self.assertEqual(dig(obj, 'norm.family'), 'euclidean')
        self.assertEqual(dig(obj, 'matrix.p[1]'), 1.5)
        self.assertEqual(dig(obj, ['matrix', 'n[0]']), 3)
        self.assertIsNone(dig(obj, 'matrix.p[5]'))
        self.assertIsNone(dig(obj, 'quadrature.kind'))

    def test_deep_merge_dict(self):
        a = dict(commands=dict(residual=dict(bumps=20, radius=0.5)), seed=0)
        b = dict(commands=dict(residual=dict(bumps=3)), seed=7)
        merged = deep_merge_dict(a, b)
        self.assertEqual(merged, dict(commands=dict(residual=dict(bumps=3, radius=0.5)), seed=7))
        self.assertEqual(a['commands']['residual']['bumps'], 20)

    def test_group_by(self):
        groups = group_by(lambda x: x % 3, [1, 2, 3, 4, 5, 6])
        self.assertEqual(groups, {0: [3, 6], 1: [1, 4], 2: [2, 5]})

    def test_replace_nan_values(self):
        obj = dict(a=float('nan'), b=[np.float64(1.5), np.inf], c=np.array([1, 2]), d=np.bool_(True))
        self.assertEqual(replace_nan_values(obj), dict(a=None, b=[1.5, None], c=[1, 2], d=True))

    def test_sphere_rule_area(self):
        for n in [2, 3, 4, 5]:
            nodes, weights = sphere_rule(n, 8)
            area = 2 * math.pi ** (n / 2) / gamma(n / 2)
            self.assertRelativelyEqual(weights.sum(), area, 1e-12)
            self.assertArrayClose(np.linalg.norm(nodes, axis=1), np.ones(len(nodes)))

    def test_sphere_rule_second_moment(self):
        nodes, weights = sphere_rule(3, 6)
        self.assertRelativelyEqual(np.sum(weights * nodes[:, 2] ** 2), 4 * math.pi / 3, 1e-12)

    def test_central_gradient(self):
        points = np.array([[0.3, -0.2, 1.0], [1.0, 2.0, -1.5]])
        grad = central_gradient(lambda x: np.sum(x ** 3, axis=1), points, 1e-5)
        self.assertArrayClose(grad, 3 * points ** 2, atol=1e-8, rtol=1e-8)

    def test_central_divergence(self):
        points = np.array([[0.3, -0.2, 1.0], [1.0, 2.0, -1.5]])
        div = central_divergence(lambda x: x * np.sum(x ** 2, axis=1)[:, None], points, 1e-5)
        self.assertArrayClose(div, 5 * np.sum(points ** 2, axis=1), atol=1e-7, rtol=1e-7)

    def test_execute_parallel_keeps_order(self):
        results = execute_parallel([(pow, (i, 2)) for i in range(10)])
        self.assertEqual(results, [i ** 2 for i in range(10)])

    def test_evaluate_in_blocks(self):
        points = np.arange(30, dtype=float).reshape(10, 3)
        values = evaluate_in_blocks(lambda x: (x.sum(axis=1), None), points, 3)
        self.assertArrayClose(values[0], points.sum(axis=1))
        self.assertIsNone(values[1])

    def test_sample_unit_vectors(self):
        vectors = sample_unit_vectors(np.random.default_rng(0), 100, 4)
        self.assertEqual(vectors.shape, (100, 4))
        self.assertArrayClose(np.linalg.norm(vectors, axis=1), np.ones(100))

    def test_critical_set(self):
        gradients = np.array([[1.0, 0.0], [0.0, 1e-12], [np.nan, 0.0], [0.5, 0.5]])
        self.assertEqual(critical_set(gradients).tolist(), [False, True, True, False])

    def test_critical_set_relative_to_decaying_values(self):
        # a slowly decaying tail is not critical even when |grad| is tiny
        radii = np.array([1e6, 1e6, 0.0])
        values = np.array([1e-6, 1e-6, 1.0])
        gradients = np.array([[1e-12, 0.0], [0.0, 0.0], [1e-9, 0.0]])
        self.assertEqual(
            critical_set(gradients, values=values, radii=radii).tolist(),
            [False, True, True],
        )
