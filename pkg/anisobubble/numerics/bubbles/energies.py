from anisobubble.numerics.bubbles.bubble import Bubble, bubble_rule
from anisobubble.numerics.bubbles.constants import (
    bubble_constant,
    conjugate_exponent,
    critical_exponent,
)
from anisobubble.numerics.quadrature.fields import as_field
from anisobubble.numerics.quadrature.integrate import integrate
from anisobubble.numerics.shared.logger import timer
from dataclasses import asdict, dataclass
from scipy.special import beta
import logging
import math
import numpy as np

logger = logging.getLogger(__name__)


@dataclass
class BubbleEnergies:
    grad_energy: float
    mass: float
    grad_error: float
    mass_error: float

    @property
    def gap(self):
        return abs(self.grad_energy - self.mass)

    @property
    def combined_error(self):
        return self.grad_error + self.mass_error

    def to_dict(self):
        return dict(asdict(self), gap=self.gap)


@dataclass
class SobolevEstimate:
    value: float
    from_mass: float
    quotient: float
    closed_form: float
    grad_energy: float
    mass: float

    def to_dict(self):
        return asdict(self)


def gradient_energy(u, p, norm, rule=None):
    """
    (int H^p(grad u) dx, error estimate) for a Field or an analytic function sampled on rule.
    """
    field = as_field(u, rule, order=1)
    integrand = norm.value(field.gradient_values) ** p
    return integrate(field.rule, integrand, exclude=field.excluded_nodes)


def lebesgue_energy(u, exponent, rule=None):
    """
    (int |u|^exponent dx, error estimate).
    """
    field = as_field(u, rule, order=0)
    return integrate(field.rule, np.abs(field.values) ** exponent, exclude=field.excluded_nodes)


def bubble_energies(b, rule=None):
    """
    Gradient energy int H^p(grad U) and mass int U^{p*} of a bubble. Both equal S_p^n.
    """
    if rule is None:
        rule = bubble_rule(b)
    if rule.n != b.n:
        raise ValueError(f'The rule has dimension {rule.n} but the bubble lives in R^{b.n}.')
    with timer('bubbles.bubble_energies', tags=dict(n=b.n, p=b.p, family=b.norm.family.value)):
        field = as_field(b.function(), rule, order=1)
        grad_energy, grad_error = gradient_energy(field, b.p, b.norm)
        mass, mass_error = lebesgue_energy(field, critical_exponent(b.n, b.p))
    return BubbleEnergies(
        grad_energy=grad_energy,
        mass=mass,
        grad_error=grad_error,
        mass_error=mass_error,
    )


def sobolev_constant_closed_form(norm, p):
    """
    S_p^n = n |B_1^{H_0}| c^n B(n/q, n - n/q) / q with q = p / (p - 1), returned as S_p.
    """
    n = norm.n
    q = conjugate_exponent(p)
    power = n * norm.unit_ball_volume() * bubble_constant(n, p) ** n * beta(n / q, n - n / q) / q
    return float(power ** (1 / n))


def sobolev_constant(norm, p, n=None, rule=None):
    """
    Estimates S_p from the energies of U_p[0, 1]: S_p = (grad_energy)^(1/n), cross-checked
    against mass^(1/n), the Sobolev quotient and the closed form.
    """
    n = norm.n if n is None else int(n)
    if n != norm.n:
        raise ValueError(f'The norm has dimension {norm.n}, got n={n}.')
    energies = bubble_energies(Bubble(norm, p, np.zeros(n), 1.0), rule)
    quotient = energies.grad_energy ** (1 / p) / energies.mass ** (1 / critical_exponent(n, p))
    return SobolevEstimate(
        value=energies.grad_energy ** (1 / n),
        from_mass=energies.mass ** (1 / n),
        quotient=quotient,
        closed_form=sobolev_constant_closed_form(norm, p),
        grad_energy=energies.grad_energy,
        mass=energies.mass,
    )


def sobolev_quotient(u, p, norm, rule=None):
    """
    ||H(grad u)||_p / ||u||_{p*}; bounded below by S_p.
    """
    field = as_field(u, rule, order=1)
    grad_energy, _ = gradient_energy(field, p, norm)
    mass, _ = lebesgue_energy(field, critical_exponent(norm.n, p))
    if not mass > 0:
        return math.inf
    return grad_energy ** (1 / p) / mass ** (1 / critical_exponent(norm.n, p))


def d1p_norm(phi, p, norm, rule=None):
    value, _ = gradient_energy(phi, p, norm, rule)
    return value ** (1 / p)
