from anisobubble.numerics.anisotropy.operations import stress_field
from anisobubble.numerics.bubbles.constants import critical_exponent
from anisobubble.numerics.bubbles.energies import d1p_norm
from anisobubble.numerics.quadrature.fields import Field, as_field
from anisobubble.numerics.quadrature.integrate import integrate
from anisobubble.numerics.quadrature.rules import support_rule
from dataclasses import asdict, dataclass
import numpy as np


@dataclass
class WeakResidual:
    pairing: float
    source: float
    residual: float
    error: float
    phi_norm: float

    @property
    def relative(self):
        return abs(self.residual) / self.phi_norm if self.phi_norm > 0 else 0.0

    def to_dict(self):
        return dict(asdict(self), relative=self.relative)


def _resolve_rule(u, phi, rule):
    if rule is not None:
        return rule
    for candidate in (u, phi):
        if isinstance(candidate, Field):
            return candidate.rule
    if hasattr(phi, 'support'):
        return support_rule(phi)
    raise ValueError('weak_residual needs a rule, a Field argument or a compactly supported phi.')


def weak_residual_terms(u, kappa, phi, p, norm, rule=None):
    """
    The Frechet pairing <J'(u), phi> = int <a(grad u), grad phi> - kappa u^{p*-1} phi dx,
    split into its stress pairing and source term.
    """
    rule = _resolve_rule(u, phi, rule)
    u_field = as_field(u, rule, order=1)
    phi_field = as_field(phi, rule, order=1)
    kappa_field = as_field(kappa, rule, order=0)
    exclude = np.union1d(u_field.excluded_nodes, phi_field.excluded_nodes)
    exclude = np.union1d(exclude, kappa_field.excluded_nodes)

    p_star = critical_exponent(norm.n, p)
    a = stress_field(norm, p, u_field.gradient_values)
    pairing, pairing_error = integrate(
        rule,
        np.sum(a * phi_field.gradient_values, axis=1),
        exclude=exclude,
    )
    source, source_error = integrate(
        rule,
        kappa_field.values * np.abs(u_field.values) ** (p_star - 2) * u_field.values * phi_field.values,
        exclude=exclude,
    )
    return WeakResidual(
        pairing=pairing,
        source=source,
        residual=pairing - source,
        error=pairing_error + source_error,
        phi_norm=d1p_norm(phi_field, p, norm),
    )


def weak_residual(u, kappa, phi, p, norm, rule=None):
    return weak_residual_terms(u, kappa, phi, p, norm, rule).residual
