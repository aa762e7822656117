DEFAULT_SEED = 0

# Fixed block size for node evaluation and for partial sums.
BLOCK_SIZE = 8192

# Central differences.
FD_STEP = 1e-5
FD_NESTED_STEP = 1e-4
FD_THIRD_DERIVATIVE_STEP = 1e-4

# Nodes with |grad| < CRITICAL_SET_TOLERANCE * (1 + median |grad|), or below that fraction
# of |u| / (1 + r) for decaying u, form the critical set.
CRITICAL_SET_TOLERANCE = 1e-8
CRITICAL_SET_MAX_FRACTION = 0.01

# kappa is dropped where the rounding error of Delta_p^H u, estimated as machine epsilon
# times the summed magnitude of its terms, exceeds this fraction of |kappa| + 1.
KAPPA_PRECISION_FLOOR = 1e-8
