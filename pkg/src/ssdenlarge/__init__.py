"""Enlargements of q-positive sets in finite-dimensional SSD spaces.

Spaces carry a symmetric bilinear form ``[b, c] = b^T G c`` with
``q(b) = [b, b] / 2``. Sets, convex functions and enlargements are exact
finite representations; every property check returns a :class:`CheckReport`.
"""

from .additivity import (additivity_conjugate_report, additivity_pair_report, calibration,
                         ebar_additive_report, equivalence_report, sqrt_bound_report)
from .enlargements import (Enlargement, e_zero_report, lambda_axioms_report, make_corrupted,
                           make_ea, make_ebar, make_eps_subdiff, make_from_repr, membership,
                           ordering_report, psi_convexity_report, psi_inverse, psi_map,
                           roundtrip_report, transportation_report_2pt,
                           transportation_report_npt, zero_level_positivity_report)
from .errors import (ConfigError, ContractError, InputError, SolverError, SsdError,
                     UnsupportedVariantError)
from .functions import (ConvexFn, GridOracle, MaxAffine, PlusQ, PointwiseFn, PolyhedralHull,
                        Quadratic, SeparableSum, WeightedSum, max_affine_sum, quad_on_graph)
from .generators import gen_random_instances
from .lp import LpProblem, LpSolution, lp_solve
from .oracle import grid_oracle_report
from .reports import CheckReport
from .representative import (at_conjugate_eval, average_repr, coincidence_report,
                             cross_validation_report, fitzpatrick_chain_report,
                             h_at_membership_report, penalized_repr, phi_eval,
                             repr_membership_report, sandwich_report, standard_reprs,
                             theta_eval, theta_star_eval, young_repr)
from .sets import (AffineGraph, FiniteSet, SubdiffGraph, maximality_refute,
                   q_positivity_report, set_from_spec, subdiff_membership)
from .spaces import (SsdSpace, anti_hilbert, calculus_identity_report, hilbert, product, r3,
                     space_from_spec, space_properties_report)


def bracket(space, b, c):
    return space.bracket(b, c)


def q_eval(space, b):
    return space.q(b)


def calculus_residual(space, alpha, gamma, b, c):
    return space.calculus_residual(alpha, gamma, b, c)


def iota_apply(space, c):
    return space.iota(c)


def banach_ssd_margin(space):
    return space.banach_ssd_margin()


def inf_q_over_set(A, b):
    """``inf_{c in A} q(b - c)``."""
    return A.inf_q(b)


def fn_eval(f, b):
    return f(b)


def conjugate_eval(f, y):
    return f.conjugate(y)


__version__ = "0.1.0"
