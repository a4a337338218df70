import os

from utils.errors import ValidationError


LOG_LEVEL = os.getenv('ROBUST_CHOICE_LOG_LEVEL', 'INFO')

# Model construction
NORMALIZATION_TOL = 1e-9      # |sum(weights) - 1| accepted and renormalized
MODEL_EQUALITY_TOL = 1e-12    # per-coordinate duplicate rule inside a ModelSet
MEMBERSHIP_TOL = 1e-9         # p "matches a member" of Q
HULL_LP_TOL = 1e-7            # CBC feasibility tolerance for hull membership

# Comparisons on the utility scale
COMPARISON_TOL = 1e-9
STRONG_DOMINANCE_EPS = 1e-6
RECOVERY_TOL = 1e-6           # worst-case model normalization slack

# Mixture-weight optimizer (convex_hull mode)
MIXTURE_TOL = 1e-9            # gradient-mapping norm (sup) at which the mixture is stationary
MIXTURE_MAX_ITER = 10000
HULL_GRID_POINTS = 21

# Dual 1-D maximization
GOLDEN_TOL = 1e-12
GOLDEN_MAX_ITER = 500
BRACKET_MAX_DOUBLINGS = 60

# Conjugate self test
CONJUGATE_T_MAX = 50.0        # initial t-window, doubled while the maximizer sits on its edge
CONJUGATE_T_CAP = 1e4
CONJUGATE_T_STEP = 1e-3
CONJUGATE_SELF_TEST_TOL = 1e-4
CONJUGATE_Y_GRID = (-5.0, 5.0, 201)

# Primal oracle
ORACLE_MAX_STATES = 4
ORACLE_RESOLUTION_RANGE = (1e-6, 1e-2)

OUTPUT_SIGNIFICANT_DIGITS = 12

DEFAULT_SWEEP_LAMBDAS = "0.1,1,10,inf"


def thread_cap() -> int:
    """Worker threads allowed for embarrassingly parallel evaluations."""
    raw = os.getenv('ROBUST_CHOICE_THREADS')
    if raw is None or raw == '':
        return max(1, os.cpu_count() or 1)
    try:
        value = int(raw)
    except ValueError:
        raise ValidationError(f"ROBUST_CHOICE_THREADS must be a positive integer, got {raw!r}",
                              pointer='env:ROBUST_CHOICE_THREADS') from None
    if value < 1:
        raise ValidationError(f"ROBUST_CHOICE_THREADS must be a positive integer, got {raw!r}",
                              pointer='env:ROBUST_CHOICE_THREADS')
    return value
