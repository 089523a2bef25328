"""Topological features of univariate time series and eye-tracking scanpaths.

Computes ordinary and extended persistent homology of fixation-derived time
series under horizontal, sloped, sigmoid and arctan filtrations, vectorizes
the diagrams into persistence images, and assembles PCA-reduced feature
vectors per trial or per reader.
"""

__version__ = "0.1.0"

from .errors import PipelineError
from .filtration import FiltrationKind, FiltrationSpec, augment, padded_range
from .persistence import (
    DiagramPoint,
    ExtendedDiagram,
    extended_persistence,
    ordinary_only,
    sublevel_sweep,
)
from .pipeline import PipelineConfig, compute_features
from .timeseries import (
    Fixation,
    FixationSequence,
    TimeSeries,
    filter_trials,
    minmax_scale,
    parse_fixation_csv,
    split,
)
from .vectorization import (
    ImageSpec,
    PcaModel,
    PersistenceImage,
    apply_pca,
    assemble_tsh_vector,
    fit_image_domain,
    fit_pca,
    render_image,
    shear,
)

__all__ = [
    "DiagramPoint",
    "ExtendedDiagram",
    "Fixation",
    "FixationSequence",
    "FiltrationKind",
    "FiltrationSpec",
    "ImageSpec",
    "PcaModel",
    "PersistenceImage",
    "PipelineConfig",
    "PipelineError",
    "TimeSeries",
    "apply_pca",
    "assemble_tsh_vector",
    "augment",
    "compute_features",
    "extended_persistence",
    "filter_trials",
    "fit_image_domain",
    "fit_pca",
    "minmax_scale",
    "ordinary_only",
    "padded_range",
    "parse_fixation_csv",
    "render_image",
    "shear",
    "split",
    "sublevel_sweep",
]
