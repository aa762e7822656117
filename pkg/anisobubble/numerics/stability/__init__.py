from anisobubble.numerics.stability.approximants import (
    DualPowerFunction,
    ProofBubbleReport,
    approximant_offset,
    first_approximant,
    proof_bubble_report,
    proof_driven_bubble,
    proof_scale,
    second_approximant,
)
from anisobubble.numerics.stability.decay import DecayReport, decay_check
from anisobubble.numerics.stability.radial_solver import (
    RadialProfile,
    RadialProfileFunction,
    pohozaev_bracket,
    radial_shoot,
)
from anisobubble.numerics.stability.sweep import (
    RadialKappa,
    StabilityRecord,
    stability_record,
    stability_sweep,
    sweep_trend,
)
