"""Numerical laboratory for critical-radius-weighted maximal operators,
Orlicz norm machinery, adapted Muckenhoupt weights, and the integral
conditions that govern their boundedness."""

from .dini import DiniReport, dini_condition_check, dini_integral, power_tail_integral
from .grids import (Cube, CubeFamily, Domain, SampledFunction,
                    ShiftedDyadicGrids, cz_decomposition, dyadic_children,
                    find_containing_dyadic, integrate)
from .harness import (ExperimentConfig, RatioReport, default_battery,
                      level_set_bound_experiment,
                      modular_fefferman_stein_experiment,
                      norm_fefferman_stein_experiment,
                      quotient_weight_cap_experiment, strong_type_experiment,
                      sufficient_sigma, two_weight_quotient_experiment,
                      unweighted_modular_experiment, unweighted_norm_experiment,
                      weak_type_experiment)
from .operators import (OperatorSpec, centered_ball_maximal, hl_maximal,
                        indicator_ball_decay_check, local_global_split,
                        localized_maximal, dyadic_localized_maximal,
                        orlicz_maximal, pointwise_power_bound_check,
                        pointwise_product_bound_check,
                        shifted_dyadic_control_check, uncentered_ball_maximal)
from .orlicz import (holder_check, inf_formula_average, luxemburg_average,
                     luxemburg_norm_global, modular, modular_norm_relation_check)
from .radius import (CriticalCovering, CriticalRadius, critical_covering,
                     enlarged_critical_cube, overlap_profile,
                     supercritical_shell_bounds_check, validate, validate_pairs)
from .specs import FunctionSpec, WeightSpec, load_value_file, save_value_file
from .weights import (WeightReport, a1_pointwise_check, a1_rho_constant,
                      ap_rho_constant, openness_probe)
from .young import (DegenerateDualError, GrowthFunction, GrowthPair,
                    YoungFunction)

__version__ = "0.1.0"
