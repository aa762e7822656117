from anisobubble.numerics.decompose.fitting import (
    BubbleFitter,
    FitResult,
    bubble_distance,
    fit_single_bubble,
    subtract_bubble,
)
from anisobubble.numerics.decompose.greedy import DecompositionResult, greedy_decompose
from anisobubble.numerics.decompose.inequalities import (
    brezis_lieb_gap,
    xi_p_constant,
    xi_p_gap,
    xi_p_property_run,
)
from anisobubble.numerics.decompose.interaction import (
    CrossEnergy,
    cross_energy,
    interaction_quantity,
    pair_rule,
    sigma_constancy,
)
