"""End-to-end orchestration: fixation CSV to diagrams and feature matrices.

Per trial the fixation sequence is split into x- and y-coordinate series,
min-max scaled, swept by the configured filtration, and reduced to two
(ordinary) or six (extended) persistence diagrams. Diagrams are rendered
into persistence images over domains fitted on a designated fit subset,
flattened and concatenated, and reduced by a PCA fitted on the same subset.
The fit subset defaults to all trials and can be restricted through fit_keys
so that a cross-validation harness can keep transforms fold-clean.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import PipelineError, ValidationError
from .filtration import FiltrationSpec, augment
from .persistence import extended_persistence, ordinary_only, points_array
from .timeseries import (
    FixationSequence,
    filter_trials,
    minmax_scale,
    parse_fixation_csv,
    split,
)
from .vectorization import (
    ImageSpec,
    PcaModel,
    apply_pca,
    assemble_tsh_vector,
    fit_image_domain,
    fit_pca,
    reader_aggregate,
    render_image,
)

MODE_ORDINARY = "ordinary"
MODE_EXTENDED = "extended"

# Fixed diagram slot order per trial; feature vectors concatenate in this order.
SLOTS = {
    MODE_ORDINARY: ("x_ordinary", "y_ordinary"),
    MODE_EXTENDED: (
        "x_ordinary",
        "x_relative",
        "x_essential",
        "y_ordinary",
        "y_relative",
        "y_essential",
    ),
}

_WORKERS = 4


@dataclass(frozen=True)
class PipelineConfig:
    """Declarative configuration of the feature pipeline."""

    filtration: FiltrationSpec = FiltrationSpec(kind="horizontal")
    persistence_mode: str = MODE_ORDINARY
    image: ImageSpec = ImageSpec(bandwidth_sigma=0.01, resolution=(50, 50))
    pca_components: int | None = None
    min_fixations: int = 5
    scale_time: bool = True
    aggregation: str = "trial"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.persistence_mode not in (MODE_ORDINARY, MODE_EXTENDED):
            raise ValidationError(f"unknown persistence_mode {self.persistence_mode!r}")
        if self.aggregation not in ("trial", "reader"):
            raise ValidationError(f"unknown aggregation {self.aggregation!r}")
        if self.min_fixations < 1:
            raise ValidationError("min_fixations must be >= 1")
        if self.pca_components is not None and self.pca_components < 1:
            raise ValidationError("pca_components must be >= 1 when set")

    @property
    def resolved_pca_components(self) -> int:
        if self.pca_components is not None:
            return self.pca_components
        return 250 if self.persistence_mode == MODE_ORDINARY else 750

    @property
    def slots(self) -> tuple[str, ...]:
        return SLOTS[self.persistence_mode]


def config_to_dict(config: PipelineConfig) -> dict:
    return {
        "filtration": {
            "kind": config.filtration.kind.value,
            "slope_c": config.filtration.slope_c,
            "padding_eps": config.filtration.padding_eps,
        },
        "persistence_mode": config.persistence_mode,
        "image": config.image.to_dict(),
        "pca_components": config.pca_components,
        "min_fixations": config.min_fixations,
        "scale_time": config.scale_time,
        "aggregation": config.aggregation,
        "seed": config.seed,
    }


def config_from_dict(data: Mapping) -> PipelineConfig:
    """Build a config from a mapping with exactly the PipelineConfig key names."""
    base = config_to_dict(PipelineConfig())
    unknown = set(data) - set(base)
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    merged = dict(base)
    merged.update(data)
    filtration = dict(base["filtration"])
    filtration.update(merged["filtration"] or {})
    unknown = set(filtration) - set(base["filtration"])
    if unknown:
        raise ValidationError(f"unknown filtration keys: {sorted(unknown)}")
    image_data = dict(base["image"])
    image_data.update(merged["image"] or {})
    unknown = set(image_data) - set(base["image"])
    if unknown:
        raise ValidationError(f"unknown image keys: {sorted(unknown)}")
    try:
        return PipelineConfig(
            filtration=FiltrationSpec(
                kind=filtration["kind"],
                slope_c=float(filtration["slope_c"]),
                padding_eps=float(filtration["padding_eps"]),
            ),
            persistence_mode=merged["persistence_mode"],
            image=ImageSpec.from_dict(image_data),
            pca_components=None
            if merged["pca_components"] is None
            else int(merged["pca_components"]),
            min_fixations=int(merged["min_fixations"]),
            scale_time=bool(merged["scale_time"]),
            aggregation=merged["aggregation"],
            seed=int(merged["seed"]),
        )
    except ValueError as err:
        raise ValidationError(str(err)) from err


def load_config(path) -> PipelineConfig:
    with open(path, "r", encoding="utf-8") as handle:
        return config_from_dict(json.load(handle))


@dataclass(frozen=True)
class TrialDiagrams:
    """All diagrams of one surviving trial, keyed by slot name."""

    reader_id: str
    trial_id: str
    label: int | None
    diagrams: dict[str, np.ndarray]

    @property
    def key(self) -> tuple[str, str]:
        return (self.reader_id, self.trial_id)


@dataclass(frozen=True)
class FeatureTable:
    """Feature matrix plus the transforms fitted to produce it."""

    mode: str
    keys: list[tuple[str, str]]
    labels: list[int | None]
    tsh: np.ndarray
    baseline: np.ndarray | None
    image_specs: dict[str, ImageSpec]
    pca: PcaModel
    skips: list[dict]

    @property
    def matrix(self) -> np.ndarray:
        if self.baseline is None:
            return self.tsh
        return np.concatenate([self.tsh, self.baseline], axis=1)


def trial_diagrams(seq: FixationSequence, config: PipelineConfig) -> TrialDiagrams:
    """Split, scale, sweep and compute the 2 or 6 diagrams of one trial."""
    diagrams: dict[str, np.ndarray] = {}
    for axis, series in zip(("x", "y"), split(seq)):
        scaled = minmax_scale(series, scale_time=config.scale_time)
        augmented = augment(scaled, config.filtration)
        if config.persistence_mode == MODE_ORDINARY:
            points = ordinary_only(augmented, "drop")
            diagrams[f"{axis}_ordinary"] = _as_array(points_array(points))
        else:
            extended = extended_persistence(augmented)
            diagrams[f"{axis}_ordinary"] = _as_array(points_array(extended.ordinary))
            diagrams[f"{axis}_relative"] = _as_array(points_array(extended.relative))
            diagrams[f"{axis}_essential"] = _as_array([extended.essential.pair])
    return TrialDiagrams(seq.reader_id, seq.trial_id, seq.label, diagrams)


def run_diagrams(
    sequences: Sequence[FixationSequence],
    config: PipelineConfig,
) -> tuple[list[TrialDiagrams], list[dict]]:
    """Diagram stage over all surviving trials; deterministic gather order.

    Trials run through a parallel map sorted by (reader_id, trial_id);
    per-trial degenerate ranges become skip entries instead of failures.
    """
    kept = filter_trials(sorted(sequences, key=lambda s: s.key), config.min_fixations)

    def one(seq: FixationSequence):
        try:
            return trial_diagrams(seq, config), None
        except PipelineError as err:
            return None, {
                "reader_id": seq.reader_id,
                "trial_id": seq.trial_id,
                "reason": f"{type(err).__name__}: {err}",
            }

    with ThreadPoolExecutor(max_workers=_WORKERS) as pool:
        outcomes = list(pool.map(one, kept))
    results = [r for r, _ in outcomes if r is not None]
    skips = [s for _, s in outcomes if s is not None]
    return results, skips


def diagram_file_record(trial: TrialDiagrams, axis: str, config: PipelineConfig) -> dict:
    """JSON payload of one trial-axis diagram file."""
    if config.persistence_mode == MODE_ORDINARY:
        kinds = ("ordinary",)
    else:
        kinds = ("ordinary", "relative", "essential")
    records = []
    for kind in kinds:
        pairs = trial.diagrams[f"{axis}_{kind}"]
        if kind == "essential":
            records.append(
                {
                    "kind": "essential",
                    "points": [],
                    "essential": {"birth": float(pairs[0][0]), "death": float(pairs[0][1])},
                }
            )
        else:
            records.append(
                {
                    "kind": kind,
                    "points": [{"birth": float(b), "death": float(d)} for b, d in pairs],
                    "essential": None,
                }
            )
    return {
        "reader_id": trial.reader_id,
        "trial_id": trial.trial_id,
        "axis": axis,
        "persistence_mode": config.persistence_mode,
        "diagrams": records,
    }


def compute_features(
    sequences: Sequence[FixationSequence],
    config: PipelineConfig,
    fit_keys: set[tuple[str, str]] | None = None,
    baseline: tuple[list[str], dict[tuple[str, str], np.ndarray]] | None = None,
) -> FeatureTable:
    """Full feature stage: diagrams, images, assembly, PCA, optional baseline join.

    Image domains and the PCA are fitted only on trials whose (reader_id,
    trial_id) key is in fit_keys (all trials when None); every surviving
    trial is transformed. Labels are carried through untouched.
    """
    trials, skips = run_diagrams(sequences, config)
    if not trials:
        raise ValidationError("no trials survive filtering; nothing to featurize")

    if fit_keys is None:
        fit_trials = trials
    else:
        fit_trials = [t for t in trials if t.key in fit_keys]
        if not fit_trials:
            raise ValidationError("fit-ids select no surviving trial")

    image_specs: dict[str, ImageSpec] = {}
    for slot in config.slots:
        image_specs[slot] = fit_image_domain(
            (t.diagrams[slot] for t in fit_trials), config.image
        )

    def assemble(trial: TrialDiagrams) -> np.ndarray:
        images = [render_image(trial.diagrams[slot], image_specs[slot]) for slot in config.slots]
        return assemble_tsh_vector(images)

    vectors = {t.key: assemble(t) for t in trials}
    fit_matrix = np.array([vectors[t.key] for t in fit_trials])
    pca = fit_pca(fit_matrix, config.resolved_pca_components)
    tsh = apply_pca(pca, np.array([vectors[t.key] for t in trials]))
    if tsh.ndim == 1:
        tsh = tsh.reshape(len(trials), -1)

    keys = [t.key for t in trials]
    labels = [t.label for t in trials]
    baseline_matrix = None
    if baseline is not None:
        _, by_key = baseline
        missing = [k for k in keys if k not in by_key]
        if missing:
            shown = ", ".join(map(str, missing[:10]))
            more = "" if len(missing) <= 10 else f" (and {len(missing) - 10} more)"
            raise ValidationError(f"baseline CSV is missing keys: {shown}{more}")
        baseline_matrix = np.array([by_key[k] for k in keys], dtype=float)

    if config.aggregation == "reader":
        keys, labels, tsh, baseline_matrix = _aggregate_by_reader(
            keys, labels, tsh, baseline_matrix
        )

    return FeatureTable(
        mode=config.persistence_mode,
        keys=keys,
        labels=labels,
        tsh=tsh,
        baseline=baseline_matrix,
        image_specs=image_specs,
        pca=pca,
        skips=skips,
    )


def _aggregate_by_reader(keys, labels, tsh, baseline_matrix):
    readers: list[str] = []
    for reader_id, _ in keys:
        if reader_id not in readers:
            readers.append(reader_id)
    out_keys, out_labels, tsh_rows, baseline_rows = [], [], [], []
    for reader_id in readers:
        rows = [i for i, (r, _) in enumerate(keys) if r == reader_id]
        reader_labels = {labels[i] for i in rows if labels[i] is not None}
        if len(reader_labels) > 1:
            raise ValidationError(
                f"reader {reader_id!r} has conflicting labels {sorted(reader_labels)}"
            )
        out_keys.append((reader_id, ""))
        out_labels.append(reader_labels.pop() if reader_labels else None)
        tsh_rows.append(reader_aggregate([tsh[i] for i in rows]))
        if baseline_matrix is not None:
            baseline_rows.append(reader_aggregate([baseline_matrix[i] for i in rows]))
    stacked_baseline = np.array(baseline_rows) if baseline_matrix is not None else None
    return out_keys, out_labels, np.array(tsh_rows), stacked_baseline


def feature_csv_text(table: FeatureTable) -> str:
    """Deterministic CSV serialization of a feature table."""
    tsh_width = table.tsh.shape[1]
    baseline_width = 0 if table.baseline is None else table.baseline.shape[1]
    header = ["reader_id", "trial_id", "label"]
    header += [f"tsh_{i:03d}" for i in range(tsh_width)]
    header += [f"bl_{i:03d}" for i in range(baseline_width)]
    lines = [",".join(header)]
    for row_index, (reader_id, trial_id) in enumerate(table.keys):
        label = table.labels[row_index]
        cells = [reader_id, trial_id, "" if label is None else str(label)]
        cells += [repr(float(v)) for v in table.tsh[row_index]]
        if table.baseline is not None:
            cells += [repr(float(v)) for v in table.baseline[row_index]]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def load_baseline_csv(raw: str | bytes) -> tuple[list[str], dict[tuple[str, str], np.ndarray]]:
    """Baseline feature vectors keyed by (reader_id, trial_id)."""
    import csv
    import io

    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")
    reader = csv.reader(io.StringIO(raw))
    header = next(reader, None)
    if not header or header[:2] != ["reader_id", "trial_id"]:
        raise ValidationError("baseline CSV must start with reader_id,trial_id columns")
    names = header[2:]
    if not names:
        raise ValidationError("baseline CSV has no feature columns")
    by_key: dict[tuple[str, str], np.ndarray] = {}
    for line_number, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ValidationError(f"baseline CSV row {line_number} has {len(row)} cells")
        try:
            values = np.array([float(cell) for cell in row[2:]])
        except ValueError as err:
            raise ValidationError(f"baseline CSV row {line_number}: {err}") from None
        by_key[(row[0], row[1])] = values
    return names, by_key


def load_fit_ids(raw: str | bytes) -> set[tuple[str, str]]:
    """(reader_id, trial_id) keys naming the transform fit subset."""
    import csv
    import io

    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")
    reader = csv.reader(io.StringIO(raw))
    header = next(reader, None)
    if not header or [c.strip() for c in header[:2]] != ["reader_id", "trial_id"]:
        raise ValidationError("fit-ids file must have a reader_id,trial_id header")
    return {(row[0], row[1]) for row in reader if row}


def parse_input_csv(path, schema=None) -> list[FixationSequence]:
    with open(path, "rb") as handle:
        return parse_fixation_csv(handle.read(), schema=schema)


def _as_array(pairs) -> np.ndarray:
    if not pairs:
        return np.empty((0, 2))
    return np.array(pairs, dtype=float)
