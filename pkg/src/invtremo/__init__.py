"""Inverse-transfer evolutionary multiobjective optimization.

The public surface re-exports the pieces most users compose: benchmark
problems, the optimizer and its configuration, dataset IO, and metrics.
Lower-level building blocks (GP training, inverse transfer models,
scalarization) live in their own modules.
"""

from .datasets import InverseDataset, load_dataset, save_dataset
from .decomposition import (
    augmented_tchebycheff,
    generate_preference_set,
    preference_from_objectives,
)
from .exceptions import (
    BoundsViolation,
    FormatError,
    InvtremoError,
    NumericalFailure,
    SpecError,
    ValidationError,
)
from .experiment import ExperimentConfig, run_experiment
from .metrics import igd, pearson_scalarized, rmse_inverse
from .optimizer import OptimizerConfig, OverlapMap, RunResult, run
from .problems import MdtlzSpec, ObjectiveNormalizer, Problem, make_mdtlz, reference_front
from .sources import generate_source_dataset

__version__ = "0.1.0"

__all__ = [
    "BoundsViolation",
    "ExperimentConfig",
    "FormatError",
    "InverseDataset",
    "InvtremoError",
    "MdtlzSpec",
    "NumericalFailure",
    "ObjectiveNormalizer",
    "OptimizerConfig",
    "OverlapMap",
    "Problem",
    "RunResult",
    "SpecError",
    "ValidationError",
    "augmented_tchebycheff",
    "generate_preference_set",
    "igd",
    "load_dataset",
    "make_mdtlz",
    "pearson_scalarized",
    "preference_from_objectives",
    "reference_front",
    "rmse_inverse",
    "run",
    "run_experiment",
    "save_dataset",
    "generate_source_dataset",
]
