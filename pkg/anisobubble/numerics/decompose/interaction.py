from anisobubble.numerics.anisotropy.constants import NormFamily
from anisobubble.numerics.anisotropy.operations import stress_field
from anisobubble.numerics.bubbles.bubble import bubble_rule
from anisobubble.numerics.bubbles.constants import decay_exponent, inner_log_radius
from anisobubble.numerics.quadrature.constants import RuleKind
from anisobubble.numerics.quadrature.fields import as_field
from anisobubble.numerics.quadrature.integrate import integrate
from anisobubble.numerics.quadrature.rules import build_rule
from anisobubble.numerics.shared.logger import timer
from dataclasses import asdict, dataclass
from typing import Optional
import numpy as np


def interaction_quantity(b1, b2):
    """
    max{lam_1 / lam_2, lam_2 / lam_1, |z_1 - z_2|^2 / (lam_1 lam_2)}.
    """
    ratio = b1.lam / b2.lam
    separation = float(np.sum((b1.z - b2.z) ** 2)) / (b1.lam * b2.lam)
    return max(ratio, 1 / ratio, separation)


@dataclass
class CrossEnergy:
    gradient_product: float
    stress_pairing: float
    interaction: float
    closed_form_shape: Optional[float] = None
    implied_constant: Optional[float] = None

    def to_dict(self):
        return asdict(self)


def pair_rule(b1, b2, **params):
    """
    A composite rule around both bubbles, or the bubble rule when they coincide.
    """
    if np.allclose(b1.z, b2.z):
        return bubble_rule(b1 if b1.lam <= b2.lam else b2, **params)
    return build_rule(
        b1.n,
        RuleKind.COMPOSITE,
        dict(
            params,
            centers=[b1.z, b2.z],
            scales=[b1.lam, b2.lam],
            tail_exponent=params.get('tail_exponent', decay_exponent(b1.n, b1.p)),
            s_min=params.get('s_min', inner_log_radius(b1.p)),
        ),
    )


def cross_energy(b1, b2, rule=None):
    """
    int |grad U_1|^{p-1} |grad U_2| and the stress pairing int <a(grad U_1), grad U_2>.

    For p = 2 and the Euclidean norm the pairing is compared with the closed-form shape
    min{lam_1 / lam_2, lam_2 / lam_1, lam_1 lam_2 / |z_1 - z_2|^2}^{(n-2)/2}; their ratio
    is the implied dimensional constant.
    """
    if b1.n != b2.n or b1.p != b2.p or b1.norm != b2.norm:
        raise ValueError('cross_energy needs two bubbles of the same family.')
    if rule is None:
        rule = pair_rule(b1, b2)
    p = b1.p
    with timer('decompose.cross_energy', tags=dict(n=b1.n, p=p)):
        first = as_field(b1.function(), rule, order=1)
        second = as_field(b2.function(), rule, order=1)
    exclude = np.union1d(first.excluded_nodes, second.excluded_nodes)
    g1 = first.gradient_values
    g2 = second.gradient_values
    product, _ = integrate(
        rule,
        np.linalg.norm(g1, axis=1) ** (p - 1) * np.linalg.norm(g2, axis=1),
        exclude=exclude,
    )
    pairing, _ = integrate(
        rule,
        np.sum(stress_field(b1.norm, p, g1) * g2, axis=1),
        exclude=exclude,
    )
    interaction = interaction_quantity(b1, b2)
    shape = None
    implied = None
    if p == 2 and b1.norm.family == NormFamily.EUCLIDEAN:
        shape = (1 / interaction) ** ((b1.n - 2) / 2)
        implied = pairing / shape
    return CrossEnergy(
        gradient_product=product,
        stress_pairing=pairing,
        interaction=interaction,
        closed_form_shape=shape,
        implied_constant=implied,
    )


def sigma_constancy(bubbles, rule=None):
    """
    Euclidean gradient energy int |grad U|^p of each bubble on its own rule (or on rule),
    and the relative spread of these values. The value does not depend on (z, lam).
    """
    values = []
    for bubble in bubbles:
        field = as_field(bubble.function(), rule or bubble_rule(bubble), order=1)
        value, _ = integrate(
            field.rule,
            np.linalg.norm(field.gradient_values, axis=1) ** bubble.p,
            exclude=field.excluded_nodes,
        )
        values.append(value)
    values = np.asarray(values)
    spread = float((values.max() - values.min()) / abs(values.mean())) if len(values) else 0.0
    return dict(relative_spread=spread, values=values.tolist())
