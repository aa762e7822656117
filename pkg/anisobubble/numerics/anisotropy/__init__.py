from anisobubble.numerics.anisotropy.constants import NormFamily
from anisobubble.numerics.anisotropy.ellipticity import (
    EllipticityEstimate,
    cph_constant,
    ellipticity_constants,
    jacobian_ratio_bound,
    norm_equivalence_constants,
    stress_difference_constant,
)
from anisobubble.numerics.anisotropy.norms import (
    AnisotropicNorm,
    EuclideanNorm,
    QuadraticNorm,
    QuarticBlendNorm,
    build_norm,
    norm_from_dict,
)
from anisobubble.numerics.anisotropy.operations import (
    dual_norm,
    eval_norm_with_derivatives,
    stress,
    stress_jacobian,
)
