"""Energy-exchange chain with tunable boundary coupling: simulation kernels,
dual occupation/walker processes, exact absorption analysis, and the
statistical checks tying them together.
"""
from __future__ import annotations

from .combinat import (ENUMERATION_LIMIT, binom, enumerate_marginal,
                       marginal_distribution, vandermonde_shift)
from .dual import (QLEstimate, dual_at_time, dual_config_from_sites, dual_step,
                   estimate_qL, expand_sites, hitting_patterns, label_step,
                   run_until_absorbed)
from .duality import (DualityCheck, StationaryMomentCheck, duality_function,
                      verify_duality, verify_stationary_moment)
from .exact import (RegimeProfile, StateSpaceError, exact_joint_hitting,
                    hitting_closed_form, hitting_oracle, p_limit,
                    pattern_counts, regime_classify,
                    stationary_moment_prediction, temperature_profile)
from .model import (StationaryProfile, config_at_time, default_burn_in,
                    default_measure_time, new_config, sample_marginals,
                    simulate_stationary, step)
from .params import EventSchedule, ModelParams, schedule, stream
from .stats import (ExpMomentReport, MomentAccumulator, ProfileFit, TrendResult,
                    batch_se, exp_moment_test, fit_profile, merge, trend_check)
from .variant import (VariantParams, variant_config_at_time, variant_default_burn_in,
                      variant_default_measure_time, variant_dual_at_time,
                      variant_dual_step, variant_duality_function,
                      variant_hitting_oracle, variant_new_config,
                      variant_simulate_stationary, variant_step,
                      variant_verify_duality, variant_walker_absorption)

__version__ = "0.1.0"
