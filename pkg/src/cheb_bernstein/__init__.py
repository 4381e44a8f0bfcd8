"""Generalized Bernstein operators on extended Chebyshev spaces.

Build a space, its non-negative Bernstein basis, and the unique operator
fixing a Haar pair; then test shape properties of the result.

>>> from cheb_bernstein import Interval, make_polynomial_space, build_bernstein_basis
>>> from cheb_bernstein import build_operator, make_haar_pair, constant, monomial
>>> iv = Interval(0.0, 1.0)
>>> op = build_operator(build_bernstein_basis(make_polynomial_space(3, iv)),
...                     make_haar_pair(constant(1.0), monomial(1), iv))
>>> [round(float(t), 12) for t in op.nodes]
[0.0, 0.333333333333, 0.666666666667, 1.0]
"""

from .basis import (BernsteinBasis, ElevationPair, build_bernstein_basis, check_nested,
                    elevation_pairs, eval_basis)
from .closed_forms import (TrigCaseResult, power_fixing_operator, rho0, trig_basis_closed,
                           trig_case, trig_counterexample, trig_operator_apply)
from .config import ExperimentConfig, load_config, parse_config
from .convexity import (ConvexityReport, arama_decomposition, bepa_transform, bepa_verdict,
                        chord_interpolant, det3, is_convex_sampled, is_g_monotone_sampled,
                        sign_consistency_sampled, standard_pair, verify_convexity_preservation,
                        verify_majorization)
from .errors import (ChebBernsteinError, ConfigError, DegenerateSpace, DomainError,
                     FixingResidual, HaarViolation, HypothesisViolation, InterlacingViolation,
                     MismatchedLevels, NonPositiveElevation, NonPositiveG, Nonexistence,
                     NotECT, NotInSpan, NotNested, RatioOutOfRange, SingularSystem)
from .operator import (BernsteinOperator, OperatorChain, apply_operator, build_chain,
                       build_operator, elevate_expansion, expand_in_basis, interlacing_matrix,
                       invert_ratio)
from .spaces import (ChebyshevSpace, FunctionDescriptor, HaarPair, Interval, as_descriptor, scaled_monomial,
                     constant, cosine, exp_monomial, linear_combination, make_exponential_space,
                     make_haar_pair, make_polynomial_space, make_trig_space, monomial, power,
                     sine, span_residual, verify_ect_sampled)

__all__ = [name for name in dir() if not name.startswith("_")]
