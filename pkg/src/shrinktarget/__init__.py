"""Shrinking-target counting experiments with restricted denominators.

Library + CLI for quantitative inhomogeneous approximation experiments:
exact factored arithmetic over prime bases, smooth and block-constructed
denominator sequences, trapezoidal window transforms, measure models with
evaluable Fourier transforms, and high-precision Monte-Carlo counting.
"""

from .arith import (FactoredNat, PrimeBasis, baker_wustholz_constant, gcd,
                    gcd_ratio_log, log2_pow_sqrt_sup, minimal_solution_count_bound,
                    minimal_solutions, smooth_count, smooth_count_bound)
from .counting import (CountKernel, CountReport, ExperimentResult,
                       HighPrecisionPoint, count_hits, gcd_error_term,
                       gcd_row_bound, gcd_rows, gcd_sum_row, littlewood_count,
                       partial_sum_lemmas, psi_sum, run_count_experiment,
                       shape_bound, star_discrepancy, verify_block_artifact)
from .measures import (AtomicFinite, Empirical, Lebesgue, MeasureModel,
                       SelfSimilar, cantor_measure, convergence_series,
                       decay_profile, del_lacunary_reduction, del_series,
                       mass_of_target, transform_mass_bounds)
from .psi import ApproxFn
from .sequences import (AppendixCArtifact, ResourceError, SeqRecord,
                        build_appendix_c, check_alpha_separated, check_growth,
                        check_lacunary, check_property_d,
                        convergent_denominators, drop_small,
                        enumerate_violations, gen_geometric, gen_smooth,
                        naive_alpha_violations, perturb_smooth,
                        strict_block_start)

__version__ = "0.1.0"
