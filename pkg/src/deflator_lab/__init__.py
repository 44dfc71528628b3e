"""Exact deflator checks for a random time and its progressive enlargement.

All arithmetic is over ``fractions.Fraction`` on finite filtered spaces, so
every martingale or deflator verdict is exact.
"""
from .azema import (azema_bundle, check_Da1, check_chgpas, eta_martingales, mult_decomp,
                    set_C, vanishing_times)
from .calculus import (StochasticInterval, bracket, delta, integrate, is_deflator, left,
                       martingale_on_set_test, martingale_test, orthogonality_test, stoch_exp,
                       stoch_log, stop_at, stop_before, supermartingale_test)
from .deflators import (Certificate, FrakM, arbitrage_witness, certificate_search,
                        deflator_at_tau, deflator_dfet, frak_m, g_deflator_search,
                        puredisc_note, ratio_supermartingale_check, whenS_search)
from .enlargement import (EnlargedPair, check_rdps, check_redreg, csinv_lift,
                          enlarge_progressively, equation_process, jeulin_yor, key_lemma_check,
                          rdi_check, rdm_check, reduce_optional, reduce_predictable,
                          reduce_predictable_time, reduce_stopping_time, yyam_solve)
from .errors import *  # noqa: F401,F403
from .harness import run_suite
from .inference import (Kernel, SigmaAlg, condB1_check, conditional_kernel, find_b1_measure,
                        infer_filtration, saturation_check)
from .jumps import K_coefficient, jump_comp, nojump_deflator, ortho_decomp
from .projections import (doob_meyer, dual_optional, dual_predictable, optional_projection,
                          predictable_projection)
from .space import (INF, FilteredSpace, MeasureChange, apply_measure_change, build_space,
                    fixture_m1, fixture_m2, is_predictable_time, is_stopping_time, rtime)

__version__ = "0.1.0"
