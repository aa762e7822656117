from anisobubble.cli.app import main, run
from anisobubble.numerics.anisotropy import (
    cph_constant,
    dual_norm,
    ellipticity_constants,
    eval_norm_with_derivatives,
    norm_from_dict,
    stress,
    stress_jacobian,
)
from anisobubble.numerics.bubbles import (
    Bubble,
    TransformParams,
    apply_transform,
    bubble_energies,
    bubble_eval,
    sobolev_constant,
    weak_residual,
)
from anisobubble.numerics.decompose import (
    brezis_lieb_gap,
    cross_energy,
    fit_single_bubble,
    greedy_decompose,
    interaction_quantity,
    xi_p_gap,
)
from anisobubble.numerics.functionals import deficit, energy_J, infer_kappa, kappa0
from anisobubble.numerics.pfunction import (
    build_pframe,
    check_diff_identity,
    check_gradP,
    check_integral_identity,
    check_integral_inequality,
)
from anisobubble.numerics.quadrature import build_rule, integrate, radial_reduce
from anisobubble.numerics.stability import (
    decay_check,
    proof_driven_bubble,
    radial_shoot,
    stability_sweep,
)
import logging

logger = logging.getLogger(__name__)
