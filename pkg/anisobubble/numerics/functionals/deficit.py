from anisobubble.numerics.bubbles.constants import critical_exponent
from anisobubble.numerics.bubbles.energies import (
    gradient_energy,
    lebesgue_energy,
    sobolev_constant_closed_form,
)
from anisobubble.numerics.errors import ZeroMassError
from anisobubble.numerics.quadrature.fields import Field, as_field
from anisobubble.numerics.quadrature.functions import AnalyticFunction, LinearCombination
from anisobubble.numerics.quadrature.integrate import integrate
from dataclasses import asdict, dataclass
from typing import Optional
import math
import numpy as np

ENERGY_WINDOW = (0.5, 1.5)


@dataclass
class DeficitReport:
    kappa0: float
    deficit: float
    energy_window_ok: bool
    grad_energy: float
    mass: float
    kappa0_energy: float
    kappa0_gap: float
    sobolev_energy: float
    energy_count: Optional[int]
    error: float

    def to_dict(self):
        return asdict(self)


def _fields(u, kappa, rule):
    u_field = as_field(u, rule, order=0)
    kappa_field = as_field(kappa, u_field.rule, order=0)
    exclude = np.union1d(u_field.excluded_nodes, kappa_field.excluded_nodes)
    return u_field, kappa_field, exclude


def _mass(u_field, p_star, exclude):
    mass, error = integrate(u_field.rule, np.abs(u_field.values) ** p_star, exclude=exclude)
    if not mass > 0:
        raise ZeroMassError('u has no positive mass', mass=mass)
    return mass, error


def kappa0(u, kappa, p, rule=None):
    """
    kappa_0 = int kappa u^{p*} / int u^{p*}.
    """
    u_field, kappa_field, exclude = _fields(u, kappa, rule)
    p_star = critical_exponent(u_field.rule.n, p)
    mass, _ = _mass(u_field, p_star, exclude)
    weighted, _ = integrate(
        u_field.rule,
        kappa_field.values * np.abs(u_field.values) ** p_star,
        exclude=exclude,
    )
    return weighted / mass


def kappa0_diagnostics(u, kappa, p, norm, rule=None):
    """
    Both quotient forms of kappa_0: int kappa u^{p*} / int u^{p*} and
    int H^p(grad u) / int u^{p*}. They agree when u solves the equation.
    """
    u_field = as_field(u, rule, order=1)
    quotient = kappa0(u_field, kappa, p)
    grad_energy, _ = gradient_energy(u_field, p, norm)
    mass, _ = lebesgue_energy(u_field, critical_exponent(norm.n, p))
    if not mass > 0:
        raise ZeroMassError('u has no positive mass', mass=mass)
    energy_quotient = grad_energy / mass
    return dict(
        energy_quotient=energy_quotient,
        gap=abs(quotient - energy_quotient),
        quotient=quotient,
    )


def energy_count(grad_energy, sobolev_energy):
    """
    The k >= 1 with (k - 1/2) S_p^n <= E <= (k + 1/2) S_p^n, or None below S_p^n / 2.
    """
    ratio = grad_energy / sobolev_energy
    if not ratio >= 0.5 or not math.isfinite(ratio):
        return None
    return max(1, int(math.floor(ratio + 0.5)))


def deficit(u, kappa, p, norm, rule=None):
    """
    Sobolev deficit ||(kappa - kappa_0) u^{p*-1}||_{(p*)'} with kappa_0 from the first
    quotient form, together with the energy window check 1/2 S^n <= E <= 3/2 S^n.
    """
    u_field = as_field(u, rule, order=1)
    u_field, kappa_field, exclude = _fields(u_field, kappa, None)
    exclude = np.union1d(exclude, u_field.excluded_nodes)
    p_star = critical_exponent(norm.n, p)
    dual = p_star / (p_star - 1)

    mass, mass_error = _mass(u_field, p_star, exclude)
    weighted, _ = integrate(
        u_field.rule,
        kappa_field.values * np.abs(u_field.values) ** p_star,
        exclude=exclude,
    )
    k0 = weighted / mass
    integral, error = integrate(
        u_field.rule,
        np.abs(kappa_field.values - k0) ** dual * np.abs(u_field.values) ** p_star,
        exclude=exclude,
    )
    value = max(integral, 0.0) ** (1 / dual)

    grad_energy, grad_error = gradient_energy(u_field, p, norm)
    sobolev_energy = sobolev_constant_closed_form(norm, p) ** norm.n
    low, high = ENERGY_WINDOW
    return DeficitReport(
        kappa0=k0,
        deficit=value,
        energy_window_ok=bool(low * sobolev_energy <= grad_energy <= high * sobolev_energy),
        grad_energy=grad_energy,
        mass=mass,
        kappa0_energy=grad_energy / mass,
        kappa0_gap=abs(k0 - grad_energy / mass),
        sobolev_energy=sobolev_energy,
        energy_count=energy_count(grad_energy, sobolev_energy),
        error=error + mass_error + grad_error,
    )


def _scale(f, factor):
    if isinstance(f, Field):
        return f.scaled(factor)
    if isinstance(f, AnalyticFunction):
        return LinearCombination([(factor, f)])
    return factor * f


def normalize_kappa0(u, kappa, p, rule=None):
    """
    Rescales (u, kappa) to (kappa_0^{1/(p*-p)} u, kappa / kappa_0), which solves the same
    equation and has kappa_0 = 1.
    """
    u_field = as_field(u, rule, order=0)
    k0 = kappa0(u_field, kappa, p)
    if not k0 > 0:
        raise ZeroMassError(f'kappa_0 = {k0} cannot be normalized', kappa0=k0)
    factor = k0 ** (1 / (critical_exponent(u_field.rule.n, p) - p))
    return _scale(u, factor), _scale(kappa, 1 / k0)
