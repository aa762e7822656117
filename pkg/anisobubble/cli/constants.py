from enum import Enum


class Subcommand(str, Enum):
    BREZIS_LIEB = 'brezis-lieb'
    BUBBLE_ENERGY = 'bubble-energy'
    DECOMPOSE = 'decompose'
    INTERACTION = 'interaction'
    PFUNCTION_CHECK = 'pfunction-check'
    PROOF_BUBBLE = 'proof-bubble'
    RESIDUAL = 'residual'
    SHOOT_RADIAL = 'shoot-radial'
    STABILITY_SWEEP = 'stability-sweep'
    VERIFY_NORM = 'verify-norm'
    XI_P = 'xi-p'


SUBCOMMANDS = frozenset([
    Subcommand.BREZIS_LIEB,
    Subcommand.BUBBLE_ENERGY,
    Subcommand.DECOMPOSE,
    Subcommand.INTERACTION,
    Subcommand.PFUNCTION_CHECK,
    Subcommand.PROOF_BUBBLE,
    Subcommand.RESIDUAL,
    Subcommand.SHOOT_RADIAL,
    Subcommand.STABILITY_SWEEP,
    Subcommand.VERIFY_NORM,
    Subcommand.XI_P,
])

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

CONFIG_VERSION = 1
REQUIRED_FIELDS = ['version', 'norm.family']

# Keys under commands.<name> holding tolerances; --tol-scale multiplies all of them.
TOLERANCE_KEYS = frozenset([
    'additivity_tolerance',
    'dual_tolerance',
    'invariance_tolerance',
    'parameter_tolerance',
    'tolerance',
])

DEFAULT_CONFIG = {
    'version': CONFIG_VERSION,
    'norm': {
        'family': 'euclidean',
        'params': {},
    },
    'matrix': {
        'n': [3, 4, 4],
        'p': [2.0, 2.0, 1.5],
    },
    'quadrature': {},
    'seed': 0,
    'threads': None,
    'tolerance_scale': 1.0,
    'output': {
        'dir': 'artifacts',
    },
    'commands': {
        'verify-norm': {
            'samples': 1000,
            'dual_tolerance': 1e-8,
        },
        'bubble-energy': {
            'lam': 1.0,
            'tolerance': 1e-5,
            'transform': {
                'lam': 2.0,
                'shift': 0.5,
            },
            'invariance_tolerance': 1e-6,
        },
        'residual': {
            'bumps': 20,
            'radius': 0.5,
            'spread': 1.5,
            'tolerance': 1e-5,
        },
        'pfunction-check': {
            'eps': 0.05,
            'bump': {
                'offset': 1.5,
                'radius': 0.5,
            },
            'points': 50,
            'sample_radius': 2.0,
            't': [1.0, 2.0],
            'tolerance': None,
        },
        'decompose': {
            'lams': [1.0, 2.0],
            'separation': 1000.0,
            'k_max': 3,
            'multistarts': 5,
            'parameter_tolerance': 1e-2,
            'additivity_tolerance': 1e-2,
        },
        'interaction': {
            'n': 4,
            'p': 2.0,
            'separations': [5.0, 10.0, 20.0],
            'tolerance': 0.1,
        },
        'xi-p': {
            'draws': 100000,
            'exponents': [1.3, 2.0, 3.7],
            'max_terms': 5,
            'dimension': 3,
        },
        'brezis-lieb': {
            'n': 4,
            'p': 1.5,
            'ladder': [10.0, 100.0, 1000.0],
            'tolerance': 1e-3,
        },
        'proof-bubble': {
            'lam': 1.0,
            'shift': 0.3,
            't_ball': 0.25,
            'tolerance': 1e-6,
        },
        'shoot-radial': {
            'cells': [[3, 2.0], [4, 2.0], [4, 1.5]],
            'lam': 1.0,
            'r_max': 20.0,
            'tolerance': 1e-4,
            'kappa': {
                'eps': 0.0,
                'width': 1.0,
            },
        },
        'stability-sweep': {
            'families': ['bump', 'gaussian', 'radial'],
            'eps': [1e-3, 3e-3, 1e-2, 3e-2],
            'lam': 1.0,
            'bump': {
                'radius': 1.0,
            },
            'gaussian': {
                'offset': 0.5,
                'width': 1.0,
            },
            'radial': {
                'widths': [0.5, 1.0],
                'r_max': 20.0,
            },
            't_ball': 0.25,
            'multistarts': 3,
        },
    },
}
