from .nonuniform import (
    CSV_COLUMNS,
    ExperimentConfig,
    ExperimentRecord,
    SequenceMember,
    build_sequences,
    check_norm_equivalence,
    estimate_direction_derivative,
    estimate_lipschitz,
    estimate_m,
    make_experiment_config,
    measure_member,
    norm_ratio,
    run_nonuniform,
    sequence_radius,
    set_distance,
    summarize,
)
from .checks import check_scaling, derivative_identity_report
from .validation import CHECKS, CheckResult, ValidationContext, raise_on_failure, run_validation

__all__ = [
    'CSV_COLUMNS', 'ExperimentConfig', 'ExperimentRecord', 'SequenceMember',
    'make_experiment_config', 'estimate_direction_derivative', 'estimate_m', 'estimate_lipschitz',
    'sequence_radius', 'build_sequences', 'measure_member', 'run_nonuniform', 'summarize',
    'check_norm_equivalence', 'norm_ratio', 'set_distance',
    'check_scaling', 'derivative_identity_report',
    'CHECKS', 'CheckResult', 'ValidationContext', 'run_validation', 'raise_on_failure',
]
