from anisobubble.numerics.bubbles.constants import critical_exponent
from anisobubble.numerics.bubbles.energies import (
    gradient_energy,
    lebesgue_energy,
    sobolev_constant_closed_form,
)
from anisobubble.numerics.decompose.constants import (
    DEFAULT_K_MAX,
    DEFAULT_MULTISTARTS,
    NEGATIVE_MASS_LIMIT,
    REMAINDER_THRESHOLD,
)
from anisobubble.numerics.decompose.fitting import fit_single_bubble, subtract_bubble
from anisobubble.numerics.decompose.interaction import interaction_quantity
from anisobubble.numerics.functionals.deficit import energy_count
from anisobubble.numerics.quadrature.fields import Field, as_field
from anisobubble.numerics.quadrature.functions import Clipped
from anisobubble.numerics.quadrature.integrate import integrate
from anisobubble.numerics.shared.constants import DEFAULT_SEED
from anisobubble.numerics.shared.logger import timer
from dataclasses import dataclass, field
from typing import List, Optional
import logging
import numpy as np

logger = logging.getLogger(__name__)


@dataclass
class DecompositionResult:
    bubbles: list
    fits: list
    bubble_energies: List[float]
    remainder_grad_energy: float
    total_grad_energy: float
    sobolev_energy: float
    interaction_matrix: np.ndarray
    energy_additivity_gap: float
    energy_count: Optional[int]
    negative_mass_fraction: float
    overlap: bool
    clipped_mass_fractions: List[float] = field(default_factory=list)

    @property
    def k(self):
        return len(self.bubbles)

    def to_dict(self):
        return dict(
            bubble_energies=self.bubble_energies,
            bubbles=[b.to_dict() for b in self.bubbles],
            clipped_mass_fractions=self.clipped_mass_fractions,
            energy_additivity_gap=self.energy_additivity_gap,
            energy_count=self.energy_count,
            fits=[f.to_dict() for f in self.fits],
            interaction_matrix=self.interaction_matrix.tolist(),
            k=self.k,
            negative_mass_fraction=self.negative_mass_fraction,
            overlap=self.overlap,
            remainder_grad_energy=self.remainder_grad_energy,
            sobolev_energy=self.sobolev_energy,
            total_grad_energy=self.total_grad_energy,
        )

    def to_rows(self):
        """
        One row per extracted bubble, in extraction order.
        """
        rows = []
        clipped = self.clipped_mass_fractions or [0.0] * self.k
        for index, (bubble, fit, energy) in enumerate(zip(self.bubbles, self.fits, self.bubble_energies)):
            row = dict(index=index, lam=bubble.lam)
            row.update({f'z{i}': value for i, value in enumerate(bubble.z)})
            row.update(
                clipped_mass=clipped[index],
                converged=fit.converged,
                grad_energy=energy,
                residual_grad_energy=fit.residual_grad_energy,
            )
            rows.append(row)
        return rows


def interaction_matrix(bubbles):
    """
    Symmetric matrix of interaction quantities; the diagonal is NaN.
    """
    k = len(bubbles)
    matrix = np.full((k, k), np.nan)
    for i in range(k):
        for j in range(i + 1, k):
            matrix[i, j] = matrix[j, i] = interaction_quantity(bubbles[i], bubbles[j])
    return matrix


def _negative_mass_fraction(remainder, p_star, total):
    if not total > 0:
        return 0.0
    negative, _ = integrate(
        remainder.rule,
        np.maximum(-remainder.values, 0.0) ** p_star,
        exclude=remainder.excluded_nodes,
    )
    return negative / total


def clipped_remainder(remainder):
    """
    max(remainder, 0) on the same rule, with derivatives set to zero where it vanishes.
    """
    order = max(remainder.order, 1)
    if remainder.function is not None:
        return Field.sample(remainder.rule, Clipped(remainder.function), order)
    negative = remainder.values <= 0
    return Field(
        remainder.rule,
        np.where(negative, 0.0, remainder.values),
        gradient_values=np.where(negative[:, None], 0.0, remainder.gradient_values),
        excluded_nodes=remainder.excluded_nodes,
    )


def greedy_decompose(
    u,
    p,
    norm,
    k_max=DEFAULT_K_MAX,
    rule=None,
    multistarts=DEFAULT_MULTISTARTS,
    seed=DEFAULT_SEED,
):
    """
    Fit-and-subtract bubble extraction.

    Bubbles are extracted while the remainder carries at least S_p^n / 2 of gradient energy
    and fewer than k_max were found. The additivity gap is
    |int H^p(grad u) - k S_p^n - remainder energy|. A remainder whose negative part exceeds
    1% of the mass of u flags overlapping bubbles.

    Each fit after the first sees the remainder with its negative part clipped to zero;
    the clipped share of the L^{p*} mass of u is recorded per step.
    """
    if k_max < 1:
        raise ValueError(f'The k_max specified \'{k_max}\' is not supported; use k_max >= 1.')
    n = norm.n
    u = as_field(u, rule, order=1)
    p_star = critical_exponent(n, p)
    sobolev_energy = sobolev_constant_closed_form(norm, p) ** n
    total, _ = gradient_energy(u, p, norm)
    mass, _ = lebesgue_energy(u, p_star)

    bubbles = []
    fits = []
    clipped_masses = []
    remainder = u
    remainder_energy = total
    with timer('decompose.greedy_decompose', tags=dict(n=n, p=p, k_max=k_max)):
        while len(bubbles) < k_max and remainder_energy >= REMAINDER_THRESHOLD * sobolev_energy:
            clipped = _negative_mass_fraction(remainder, p_star, mass)
            target = clipped_remainder(remainder) if np.any(remainder.values < 0) else remainder
            fit = fit_single_bubble(
                target,
                p,
                norm,
                multistarts=multistarts,
                seed=seed + len(bubbles),
            )
            if fit.degenerate:
                break
            fits.append(fit)
            clipped_masses.append(clipped)
            bubbles.append(fit.bubble)
            remainder = subtract_bubble(remainder, fit.bubble)
            remainder_energy, _ = gradient_energy(remainder, p, norm)
            logger.debug(
                f'greedy_decompose: extracted {fit.bubble!r}, remainder energy {remainder_energy:.6g}'
            )

    energies = [gradient_energy(b.function(), p, norm, u.rule)[0] for b in bubbles]
    negative = _negative_mass_fraction(remainder, p_star, mass)
    overlap = negative > NEGATIVE_MASS_LIMIT
    if overlap:
        logger.warning(f'greedy_decompose: remainder negative mass fraction {negative:.3%}')
    return DecompositionResult(
        bubbles=bubbles,
        fits=fits,
        bubble_energies=energies,
        remainder_grad_energy=remainder_energy,
        total_grad_energy=total,
        sobolev_energy=sobolev_energy,
        interaction_matrix=interaction_matrix(bubbles),
        energy_additivity_gap=abs(total - len(bubbles) * sobolev_energy - remainder_energy),
        energy_count=energy_count(total, sobolev_energy),
        negative_mass_fraction=negative,
        overlap=overlap,
        clipped_mass_fractions=clipped_masses,
    )
