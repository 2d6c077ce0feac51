"""Fisher randomization tests as confidence distributions.

Thin bindings over the C++ core. Designs are ``Design`` objects or strings
such as ``"CRD(10,5)"``, ``"RBD[(4,2),(6,3)]"`` or ``"blocks(2,8)"``.
"""

from ._core import (
    ComputationError,
    Design,
    FrtcdError,
    InputError,
    PreconditionError,
    StepFunction,
    audit,
    combine_values,
    combined_interval,
    confidence_interval,
    error_bound,
    generate_population,
    observed_statistic,
    p_values,
    plan,
    read_experiment_csv,
    required_k,
    run_scenario,
    statistics,
    step_function,
    traditional_interval,
)

__version__ = "0.1.0"

__all__ = [
    "ComputationError",
    "Design",
    "FrtcdError",
    "InputError",
    "PreconditionError",
    "StepFunction",
    "audit",
    "combine_values",
    "combined_interval",
    "confidence_interval",
    "error_bound",
    "generate_population",
    "observed_statistic",
    "p_values",
    "plan",
    "read_experiment_csv",
    "required_k",
    "run_scenario",
    "statistics",
    "step_function",
    "traditional_interval",
]
