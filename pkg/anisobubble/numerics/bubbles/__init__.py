from anisobubble.numerics.bubbles.bubble import Bubble, BubbleFunction, bubble_eval, bubble_rule
from anisobubble.numerics.bubbles.energies import (
    BubbleEnergies,
    SobolevEstimate,
    bubble_energies,
    d1p_norm,
    sobolev_constant,
    sobolev_constant_closed_form,
    sobolev_quotient,
)
from anisobubble.numerics.bubbles.residual import WeakResidual, weak_residual, weak_residual_terms
from anisobubble.numerics.bubbles.transforms import TransformParams, apply_transform
