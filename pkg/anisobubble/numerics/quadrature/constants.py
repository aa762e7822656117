from enum import Enum


class RuleKind(str, Enum):
    COMPOSITE = 'composite'
    LOCAL_BALL = 'local_ball'
    LOW_DISCREPANCY = 'low_discrepancy_importance'
    SPHERICAL = 'spherical'
    TENSOR_MAPPED = 'tensor_mapped'


class FieldSource(str, Enum):
    ANALYTIC = 'analytic'
    DATA = 'data'


RULE_KINDS = frozenset([
    RuleKind.COMPOSITE,
    RuleKind.LOCAL_BALL,
    RuleKind.LOW_DISCREPANCY,
    RuleKind.SPHERICAL,
    RuleKind.TENSOR_MAPPED,
])

SUPPORTED_DIMENSIONS = frozenset([2, 3, 4, 5])
TENSOR_MAX_DIMENSION = 3

# Spherical rules: trapezoid in s = log(r / scale) times an angular product rule.
DEFAULT_ANGULAR_ORDERS = {2: 32, 3: 16, 4: 8, 5: 6}
DEFAULT_LOG_STEP = 0.2
DEFAULT_S_MIN = -12.0
MAX_S_MAX = 80.0
TAIL_TOLERANCE = 1e-11

# Composite rules glue spherical sub-rules with weights (1 + |x - c|^2 / L^2)^(-exponent).
PARTITION_EXPONENT = 4
# A sub-rule whose partition weight at another center exceeds the overlap tolerance uses
# the log step scaled by that center's width over its distance, but no finer than the floor.
COMPOSITE_OVERLAP_TOLERANCE = 1e-10
COMPOSITE_MIN_LOG_STEP = 0.02

DEFAULT_TENSOR_ORDER = 64
DEFAULT_TENSOR_SCALE = 1.0

DEFAULT_LDI_NODES = 2 ** 16

DEFAULT_BALL_RADIAL_ORDERS = {2: 64, 3: 64, 4: 96, 5: 64}
DEFAULT_BALL_ANGULAR_ORDERS = {2: 32, 3: 16, 4: 16, 5: 6}
# The companion of a ball rule halves the radial order and scales the angular one.
BALL_COMPANION_ANGULAR_RATIO = 2 / 3

# Error estimates never drop below this many ulps of the absolute sum.
ERROR_FLOOR_FACTOR = 64

# Tail divergence detection for radial_reduce.
TAIL_CHECK_START = 10.0
TAIL_CHECK_LEVELS = 6
TAIL_RELATIVE_FLOOR = 1e-8
TAIL_RATIO = 0.95
