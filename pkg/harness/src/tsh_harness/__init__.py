"""Evaluation harness for the scanpath-tda pipeline.

Generates labeled synthetic scanpath corpora, runs grouped stratified
nested cross-validation with randomized hyperparameter search over the
core command line interface, and reports ROC AUC per model.
"""

__version__ = "0.1.0"

from .folds import CvPlan, InfeasibleStratificationError, build_folds
from .nested import (
    MODELS,
    BaselineProducer,
    CorePipelineProducer,
    FoldLeakageError,
    NestedCvResult,
    build_plan,
    nested_cv,
    permuted_reader_labels,
    result_row,
    text_table,
)
from .pipeline_client import CorpusIndex, FeatureFrame, run_core_features
from .search import SearchSpace, derive_seed, sample_hyperparameters, splitmix64
from .synthetic import ClassParams, generate_synthetic_corpus

__all__ = [
    "MODELS",
    "BaselineProducer",
    "ClassParams",
    "CorePipelineProducer",
    "CorpusIndex",
    "CvPlan",
    "FeatureFrame",
    "FoldLeakageError",
    "InfeasibleStratificationError",
    "NestedCvResult",
    "SearchSpace",
    "build_folds",
    "build_plan",
    "derive_seed",
    "generate_synthetic_corpus",
    "nested_cv",
    "permuted_reader_labels",
    "result_row",
    "run_core_features",
    "sample_hyperparameters",
    "splitmix64",
    "text_table",
]
