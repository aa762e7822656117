DEFAULT_MULTISTARTS = 5
DEFAULT_K_MAX = 3

# Powell search over ((z - z_init) / lam_init, log(lam / lam_init)).
CENTER_BOUND = 4.0
LOG_SCALE_BOUND = 5.0
MULTISTART_SPREAD = 0.25
OPTIMIZER_XTOL = 1e-10
OPTIMIZER_FTOL = 1e-15
OPTIMIZER_MAX_EVALUATIONS = 4000

# Nodes whose value lies within this band around half the maximum estimate the width.
HALF_HEIGHT_BAND = (0.4, 0.6)

# Greedy extraction stops once the remainder carries less than this share of S_p^n.
REMAINDER_THRESHOLD = 0.5
NEGATIVE_MASS_LIMIT = 0.01

XI_P_DRAWS = 100000
XI_P_EXPONENTS = (1.3, 2.0, 3.7)
XI_P_MAX_TERMS = 5
XI_P_DIMENSION = 3
