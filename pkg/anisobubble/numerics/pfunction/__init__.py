from anisobubble.numerics.pfunction.checks import (
    CheckReport,
    a_bounds,
    check_diff_identity,
    check_gradP,
    check_integral_identity,
    check_integral_inequality,
    classify,
    trace_identity_defect,
    weighted_traceless_estimate,
)
from anisobubble.numerics.pfunction.constants import PFunctionCheck
from anisobubble.numerics.pfunction.frame import (
    PFrame,
    VTransformFunction,
    build_pframe,
    pfunction_terms,
    pfunction_values,
)
