from enum import Enum


class PerturbationKind(str, Enum):
    BUMP = 'bump'
    GAUSSIAN = 'gaussian'
    RADIAL = 'radial'


PERTURBATION_KINDS = frozenset([
    PerturbationKind.BUMP,
    PerturbationKind.GAUSSIAN,
    PerturbationKind.RADIAL,
])

DEFAULT_T_BALL = 0.25
DEFAULT_EPS_LADDER = [1e-3, 3e-3, 1e-2, 3e-2]
THETA_GRID = (0.25, 0.5, 0.75, 1.0)
LAMBDA_BRACKET = (1e-2, 1e2)
SPEARMAN_THRESHOLD = 0.9

# Local ascent refining the maximum point of u.
ASCENT_XATOL = 1e-10
ASCENT_FATOL = 1e-15
ASCENT_MAX_ITERATIONS = 2000

# Root solve of a(grad v) = 0 started from the ascent point; shifts are relative.
STATIONARY_XTOL = 1e-13
STATIONARY_MAX_SHIFT = 1e-2

# Radial shooting.
RADIAL_START = 1e-6
RADIAL_RTOL = 1e-11
RADIAL_ATOL = 1e-14
RADIAL_GRID_POINTS = 2001
RADIAL_BLOW_UP = 1e12
DEFAULT_RADIAL_MAX = 20.0

STABILITY_COLUMNS = [
    'n',
    'p',
    'family',
    'perturbation',
    'eps',
    'deficit',
    'dist',
    'proof_dist',
    'kappa0',
    'energy',
    'window_ok',
]


class RadialStatus(str, Enum):
    BLOW_UP = 'blow-up'
    FAILED = 'failed'
    OK = 'ok'
    SIGN_CHANGE = 'sign-change'

# Perturbation families of the sweep.
DEFAULT_BUMP_RADIUS = 1.0
DEFAULT_GAUSSIAN_OFFSET = 0.5
DEFAULT_GAUSSIAN_WIDTH = 1.0
DEFAULT_RADIAL_WIDTHS = [0.5, 1.0]
DEFAULT_SWEEP_MULTISTARTS = 3
# Rungs after the first start from the previous rung's fit.
WARM_START_MULTISTARTS = 1
FINAL_RUNG_FACTOR = 10.0
