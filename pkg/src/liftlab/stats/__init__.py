from .gaps import (
    GapSample,
    continuous_gap_matrix,
    coupled_gap_matrices,
    discrete_gap_matrix,
    fit_offset_constant,
    gap_survival_exact,
    sample_continuous_gaps,
    sample_discrete_gaps,
    subset_gap_event,
)
from .harness import TrialConfig, run_trials, summarize, summarize_by_h, trial_seed
from .inference import EstimateCI, KSResult, harmonic, ks_test, nonincreasing_within_ci, wilson_interval
