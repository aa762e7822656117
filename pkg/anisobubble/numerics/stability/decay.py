from anisobubble.numerics.bubbles.constants import validate_exponents
from anisobubble.numerics.quadrature.fields import as_field
from dataclasses import dataclass
from typing import Optional
import logging
import numpy as np

logger = logging.getLogger(__name__)


@dataclass
class DecayReport:
    c0: float
    C0: float
    C1: Optional[float]
    conforming: bool
    tightness: float
    worst_node: int
    worst_point: list
    value_exponent: float
    gradient_exponent: float

    def to_dict(self):
        return dict(
            C0=self.C0,
            C1=self.C1,
            c0=self.c0,
            conforming=self.conforming,
            gradient_exponent=self.gradient_exponent,
            tightness=self.tightness,
            value_exponent=self.value_exponent,
            worst_node=self.worst_node,
            worst_point=self.worst_point,
        )


def decay_check(u, p, norm, center=None):
    """
    Tightest constants with

        c0 / (1 + |x|^{(n-p)/(p-1)}) <= u(x) <= C0 / (1 + |x|^{(n-p)/(p-1)}),
        |grad u(x)| <= C1 / (1 + |x|^{(n-1)/(p-1)})

    over the nodes of u, with |x| measured from center (the rule center by default).
    u conforms when c0 > 0; otherwise worst_node is where the lower envelope fails.
    """
    n = norm.n
    validate_exponents(n, p)
    u = as_field(u, None, order=1 if u.function is not None else 0)
    nodes = u.rule.nodes
    origin = u.rule.center if center is None else np.asarray(center, dtype=float)
    radii = np.linalg.norm(nodes - origin, axis=1)
    value_exponent = (n - p) / (p - 1)
    gradient_exponent = (n - 1) / (p - 1)

    keep = ~u.mask & np.isfinite(u.values)
    scaled = np.where(keep, u.values * (1 + radii ** value_exponent), np.nan)
    worst = int(np.nanargmin(scaled))
    c0 = max(float(np.nanmin(scaled)), 0.0)
    C0 = float(np.nanmax(scaled))

    C1 = None
    if u.gradient_values is not None:
        gradients = np.linalg.norm(u.gradient_values, axis=1)
        finite = keep & np.isfinite(gradients)
        if finite.any():
            C1 = float(np.max(gradients[finite] * (1 + radii[finite] ** gradient_exponent)))

    conforming = c0 > 0
    if not conforming:
        logger.warning(f'decay_check: lower envelope fails at node {worst} (|x| = {radii[worst]:.6g})')
    return DecayReport(
        c0=c0,
        C0=C0,
        C1=C1,
        conforming=conforming,
        tightness=C0 / c0 if conforming else float('inf'),
        worst_node=worst,
        worst_point=nodes[worst].tolist(),
        value_exponent=value_exponent,
        gradient_exponent=gradient_exponent,
    )
