from anisobubble.numerics.anisotropy.constants import (
    MIN_ELLIPTICITY_SAMPLES,
    STRESS_DIFFERENCE_SAMPLES,
)
from anisobubble.numerics.anisotropy.operations import stress_field
from anisobubble.numerics.errors import NotUniformlyConvexError
from anisobubble.numerics.shared.logger import timer
from anisobubble.numerics.shared.utils import sample_unit_vectors
from dataclasses import asdict, dataclass
import numpy as np


@dataclass(frozen=True)
class EllipticityEstimate:
    lambda_H: float
    Lambda_H: float
    sample_count: int

    def __post_init__(self):
        if not 0 < self.lambda_H <= self.Lambda_H:
            raise ValueError(
                f'Invalid ellipticity constants ({self.lambda_H}, {self.Lambda_H}).'
            )

    @property
    def ratio(self):
        return self.lambda_H / self.Lambda_H

    def to_dict(self):
        return asdict(self)


def ellipticity_constants(norm, samples=1000, seed=0):
    """
    Sampled bounds lambda_H |eta|^2 <= <hess(H^2 / 2)(xi) eta, eta> <= Lambda_H |eta|^2.

    The extremes over eta are exact (eigenvalues); xi runs over seeded unit samples.
    """
    if samples < MIN_ELLIPTICITY_SAMPLES:
        raise ValueError(
            f'At least {MIN_ELLIPTICITY_SAMPLES} samples are needed, got {samples}.'
        )
    rng = np.random.default_rng(seed)
    with timer('anisotropy.ellipticity_constants', tags=dict(family=norm.family.value)):
        directions = sample_unit_vectors(rng, samples, norm.n)
        eigenvalues = np.linalg.eigvalsh(norm.half_square_hessian(directions))
    lowest = float(eigenvalues.min())
    highest = float(eigenvalues.max())
    if not lowest > 0:
        raise NotUniformlyConvexError(
            f'Non-positive ellipticity minimum {lowest:.3e}',
            minimum=lowest,
        )
    return EllipticityEstimate(lambda_H=lowest, Lambda_H=highest, sample_count=samples)


def jacobian_ratio_bound(p, est):
    """
    rho_{p,H} = (lambda_H / Lambda_H) (p - 1)^{sgn(2 - p)}, a lower bound for
    lambda_min(A) / lambda_max(A).
    """
    if not p > 1:
        raise ValueError(f'The exponent p specified \'{p}\' is not supported.')
    return est.ratio * (p - 1) ** np.sign(2 - p)


def cph_constant(p, est):
    rho = jacobian_ratio_bound(p, est)
    return float((1 - rho) ** 2 / (1 + rho ** 2))


def norm_equivalence_constants(norm, samples=1000, seed=0):
    """
    Sampled (c_H, C_H) with c_H |xi| <= H(xi) <= C_H |xi|.
    """
    rng = np.random.default_rng(seed)
    values = norm.value(sample_unit_vectors(rng, samples, norm.n))
    return float(values.min()), float(values.max())


def stress_difference_constant(norm, p, samples=STRESS_DIFFERENCE_SAMPLES, seed=0):
    """
    Brute-force sup of |a(xi + eta) - a(xi)| / H^{p-1}(eta) for 1 < p <= 2.

    Magnitudes of xi and eta are drawn log-uniformly over six decades so that both the
    small and the large |eta| / |xi| regimes are sampled.
    """
    if not 1 < p <= 2:
        raise ValueError(f'The exponent p specified \'{p}\' is not supported; use 1 < p <= 2.')
    rng = np.random.default_rng(seed)
    xi = sample_unit_vectors(rng, samples, norm.n) * 10 ** rng.uniform(-3, 3, (samples, 1))
    eta = sample_unit_vectors(rng, samples, norm.n) * 10 ** rng.uniform(-3, 3, (samples, 1))
    diff = np.linalg.norm(stress_field(norm, p, xi + eta) - stress_field(norm, p, xi), axis=1)
    return float(np.max(diff / norm.value(eta) ** (p - 1)))
