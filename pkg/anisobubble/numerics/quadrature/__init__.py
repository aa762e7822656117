from anisobubble.numerics.quadrature.constants import FieldSource, RuleKind
from anisobubble.numerics.quadrature.fields import Field
from anisobubble.numerics.quadrature.functions import (
    AnalyticFunction,
    Bump,
    Clipped,
    Constant,
    Gaussian,
    LinearCombination,
    Transformed,
)
from anisobubble.numerics.quadrature.integrate import integrate
from anisobubble.numerics.quadrature.radial import radial_reduce
from anisobubble.numerics.quadrature.rules import QuadratureRule, build_rule, rule_from_dict
