from enum import Enum


class NormFamily(str, Enum):
    EUCLIDEAN = 'euclidean'
    QUADRATIC = 'quadratic'
    QUARTIC_BLEND = 'quartic_blend'


NORM_FAMILIES = frozenset([
    NormFamily.EUCLIDEAN,
    NormFamily.QUADRATIC,
    NormFamily.QUARTIC_BLEND,
])

# Dual norm of the quartic family by damped Newton iteration.
DUAL_TOLERANCE = 1e-12
DUAL_MAX_ITERATIONS = 200
DUAL_STEP_TOLERANCE = 1e-10
ARMIJO_CONSTANT = 1e-4
ARMIJO_MAX_HALVINGS = 40
NEWTON_FULL_STEP_THRESHOLD = 1e-6

QUARTIC_EPSILON_MAX = 1.0
ADMISSIBILITY_SAMPLES = 256

MIN_ELLIPTICITY_SAMPLES = 100
STRESS_DIFFERENCE_SAMPLES = 10000

# Angular orders by dimension for |B_1^{H_0}| when no closed form exists.
UNIT_BALL_ANGULAR_ORDERS = {2: 256, 3: 64, 4: 24, 5: 12}
