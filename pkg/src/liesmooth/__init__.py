"""Smoothing of strongly convex asymmetric norms on Lie algebras and the
coadjoint extremal flows they generate on Lie groups."""

from .asymnorm import (NormConstants, NormModel, check_enclosing_sphere,
                       check_norm_axioms, check_radial_growth,
                       check_strong_convexity, compute_constants,
                       estimate_extrema, estimate_gamma, euclidean_norm,
                       gamma0_value, randers_norm, shifted_max_norm,
                       table_norm)
from .converge import (ConvergenceReport, FilippovReport, SweepConfig,
                       check_filippov_hypotheses, run_sweep)
from .dualmax import (DualEval, LipschitzBudget, certify_u_lipschitz,
                      dual_extrema, dual_norm, hyperplane_distance,
                      lipschitz_budget)
from .extremal import (ExtremalTrajectory, certify_field_lipschitz,
                       dual_annulus, integrate_vertical, reconstruct_group,
                       shared_dual_annulus)
from .liealg import (GroupElement, LieAlgebraModel, algebra, bracket,
                     coadjoint_field, custom_algebra, group_distance,
                     group_exp, group_log, group_mul, group_step,
                     identity_element)
from .mollify import (Mollifier, MollifiedNorm, Convolver, build_mollified_norm,
                      convolve_F2, eval_mollified, extract_phi)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
