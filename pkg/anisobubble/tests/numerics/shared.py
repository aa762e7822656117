from anisobubble.numerics.anisotropy.norms import EuclideanNorm, QuadraticNorm, QuarticBlendNorm
import math

# (n, p) cells used across the numerics tests.
CELLS = [
    (3, 2.0),
    (4, 2.0),
    (4, 1.5),
]


def sample_norms(n):
    return [
        EuclideanNorm(n),
        QuadraticNorm.from_diagonal([2.0, 0.5], n=n),
        QuarticBlendNorm(n, 0.5),
    ]


def euclidean_sobolev_energy_3d():
    """
    S_2^3 for the Euclidean norm: (3 (pi / 2)^(4/3))^(3/2).
    """
    return (3 * (math.pi / 2) ** (4 / 3)) ** 1.5
