"""Circle-method tools over F_q[t]: Weyl and Gauss sums, major arcs, multiplier operators,
maximal functions and finite ergodic models."""

__version__ = "0.1.0"

from .config import CONFORMING, NONCONFORMING, Overrides, count_limit, set_count_limit
from .errors import CountLimitError, FieldMismatchError, PrecisionError, RangeError
from .ffpoly import FieldParams, Poly, parse_poly
from .torus import RationalTail, TailSeries, expand_rational, parse_tail, random_tail
from .expsum import CycloSum, ExponentSystem, gauss_sum, gauss_sum_exact, gauss_table, multiplier_M, \
    weyl_sum
from .arcs import ArcScale, RationalPoint, check_disjointness, classify, verify_major_arc_identity
from .operators import GridFunction, OperatorParams, apply_C, apply_D, apply_L, apply_M, build_G
from .functionals import dyadic_maximal_check, hl_maximal, oscillation, weak_11_check
from .normalform import reduce_to_normal_form, verify_normal_form
from .inverse import best_rational_approx, decay_profile, k_star, lucas_leq, shadow, \
    verify_weyl_inverse
from .ergodic import build_translation_system, convergence_probe, ergodic_average, transference_check
