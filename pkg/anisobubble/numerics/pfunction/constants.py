from enum import Enum


class PFunctionCheck(str, Enum):
    DIFF_IDENTITY = 'diff-identity'
    GRADP = 'gradp'
    INTEGRAL_IDENTITY = 'integral-identity'
    INTEGRAL_INEQUALITY = 'integral-inequality'


PFUNCTION_CHECKS = frozenset([
    PFunctionCheck.DIFF_IDENTITY,
    PFunctionCheck.GRADP,
    PFunctionCheck.INTEGRAL_IDENTITY,
    PFunctionCheck.INTEGRAL_INEQUALITY,
])

GRADP_TOLERANCE = 1e-4
DIFF_IDENTITY_TOLERANCE = 1e-3
INTEGRAL_IDENTITY_TOLERANCE = 1e-3
INTEGRAL_INEQUALITY_TOLERANCE = 1e-4

# Exponent range of the test weight P^t.
T_MIN = 0.0
T_MAX = 3.0
INEQUALITY_T_MIN = 1.0

TRACE_IDENTITY_TOLERANCE = 1e-5
TRACE_IDENTITY_FRACTION = 0.99

BUBBLE_TRACELESS_TOLERANCE = 1e-6
BUBBLE_SPREAD_TOLERANCE = 1e-6

# A finite-difference result is inconclusive when halving the step moves it by at least
# this fraction of the observed defect.
NOISE_RATIO = 0.5
