"""Nested cross-validation with randomized search over the core pipeline.

Outer folds estimate generalization; inner folds (same grouping and
stratification rules) pick a configuration out of randomized draws; the
winner is refitted on the outer training set and scored on the outer test
set with ROC AUC. Every feature computation goes through the core CLI with
--fit-ids naming the exact trials the image domain and PCA may be fitted
on, and fit/evaluation unit sets are asserted disjoint per fold.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sklearn.ensemble import RandomForestClassifier
from sklearn.metrics import roc_auc_score
from sklearn.pipeline import Pipeline
from sklearn.preprocessing import StandardScaler
from sklearn.svm import SVC

from .folds import CvPlan, build_folds
from .pipeline_client import (
    CorpusIndex,
    FeatureFrame,
    parse_feature_csv,
    run_core_features,
)
from .search import SearchSpace, derive_seed, sample_hyperparameters

MODELS = ("tsh-svm", "bl-svm", "bl-rf", "hybrid-svm", "hybrid-rf")

Key = tuple[str, str]


class FoldLeakageError(RuntimeError):
    """A fit set intersected its evaluation set."""


def assert_fold_clean(fit_units, eval_units, stage: str) -> None:
    overlap = set(fit_units) & set(eval_units)
    if overlap:
        raise FoldLeakageError(f"{stage}: {len(overlap)} units in both fit and eval sets")


@dataclass(frozen=True)
class FoldOutcome:
    fold: int
    roc_auc: float
    best_params: dict
    best_inner_score: float


@dataclass(frozen=True)
class NestedCvResult:
    model: str
    outcomes: tuple[FoldOutcome, ...]

    @property
    def fold_scores(self) -> list[float]:
        return [o.roc_auc for o in self.outcomes]

    @property
    def mean_roc_auc(self) -> float:
        return float(np.mean(self.fold_scores))

    @property
    def std_roc_auc(self) -> float:
        return float(np.std(self.fold_scores))

    @property
    def best_kinds(self) -> list[str]:
        return [o.best_params.get("kind", "n/a") for o in self.outcomes]


class CorePipelineProducer:
    """Features through the core CLI for TSH and hybrid models.

    Units are trial keys at trial level and (reader_id, "") keys at reader
    level, matching the keys of the core's feature CSV rows.
    """

    def __init__(
        self,
        corpus: CorpusIndex,
        base_config: dict,
        workdir: Path,
        level: str = "trial",
        baseline_csv: Path | None = None,
    ):
        if level not in ("trial", "reader"):
            raise ValueError(f"unknown level {level!r}")
        self.corpus = corpus
        self.base_config = dict(base_config)
        self.workdir = Path(workdir)
        self.level = level
        self.baseline_csv = baseline_csv
        self._subset_cache: dict[tuple, Path] = {}
        self.workdir.mkdir(parents=True, exist_ok=True)

    # ---- unit bookkeeping -------------------------------------------------

    def units(self) -> list[Key]:
        if self.level == "trial":
            return self.corpus.keys
        return [(reader, "") for reader in self.corpus.readers()]

    def unit_labels(self, units) -> list[int]:
        labels = []
        for unit in units:
            if self.level == "trial":
                label = self.corpus.label_of[unit]
            else:
                label = self.corpus.reader_label(unit[0])
            if label is None:
                raise ValueError(f"unit {unit!r} has no label")
            labels.append(int(label))
        return labels

    def unit_groups(self, units) -> list[str]:
        return [unit[0] for unit in units]

    def _trial_keys(self, units) -> list[Key]:
        if self.level == "trial":
            return list(units)
        return self.corpus.keys_of_readers([unit[0] for unit in units])

    # ---- feature computation ----------------------------------------------

    def _subset_csv(self, trial_keys) -> Path:
        cache_key = tuple(sorted(trial_keys))
        if cache_key not in self._subset_cache:
            path = self.workdir / f"subset_{len(self._subset_cache):04d}.csv"
            path.write_text(self.corpus.subset_text(trial_keys), encoding="utf-8")
            self._subset_cache[cache_key] = path
        return self._subset_cache[cache_key]

    def config_for(self, params: dict) -> dict:
        config = dict(self.base_config)
        filtration = dict(config.get("filtration") or {})
        filtration["kind"] = params["kind"]
        filtration["slope_c"] = params["slope_c"]
        config["filtration"] = filtration
        image = dict(config.get("image") or {})
        image["bandwidth_sigma"] = params["bandwidth_sigma"]
        config["image"] = image
        config["aggregation"] = self.level
        return config

    def __call__(self, params: dict, fit_units, input_units) -> FeatureFrame:
        fit_trials = self._trial_keys(fit_units)
        input_trials = self._trial_keys(input_units)
        return run_core_features(
            input_csv=self._subset_csv(input_trials),
            config=self.config_for(params),
            workdir=self.workdir,
            fit_keys=fit_trials,
            baseline_csv=self.baseline_csv,
        )


class BaselineProducer:
    """Precomputed baseline features only; nothing to fit, no core invocation."""

    def __init__(self, corpus: CorpusIndex, baseline_csv: Path, level: str = "trial"):
        self.corpus = corpus
        self.level = level
        self.frame = parse_feature_csv(
            _baseline_as_feature_csv(Path(baseline_csv).read_text(encoding="utf-8"), corpus)
        )

    def units(self) -> list[Key]:
        if self.level == "trial":
            return list(self.frame.keys)
        return [(reader, "") for reader in sorted({k[0] for k in self.frame.keys})]

    def unit_labels(self, units) -> list[int]:
        if self.level == "trial":
            index = {key: i for i, key in enumerate(self.frame.keys)}
            return [int(self.frame.labels[index[unit]]) for unit in units]
        return [int(self.corpus.reader_label(unit[0])) for unit in units]

    def unit_groups(self, units) -> list[str]:
        return [unit[0] for unit in units]

    def __call__(self, params: dict, fit_units, input_units) -> FeatureFrame:
        if self.level == "trial":
            wanted = set(input_units)
            rows = [i for i, key in enumerate(self.frame.keys) if key in wanted]
            return FeatureFrame(
                keys=[self.frame.keys[i] for i in rows],
                labels=self.frame.labels[rows],
                matrix=self.frame.matrix[rows],
            )
        keys, labels, rows = [], [], []
        for reader, _ in sorted(input_units):
            indices = [i for i, key in enumerate(self.frame.keys) if key[0] == reader]
            keys.append((reader, ""))
            labels.append(float(self.corpus.reader_label(reader)))
            rows.append(self.frame.matrix[indices].mean(axis=0))
        return FeatureFrame(keys=keys, labels=np.array(labels), matrix=np.array(rows))


def _baseline_as_feature_csv(text: str, corpus: CorpusIndex) -> str:
    """Rewrite a baseline CSV into the feature CSV layout (adds labels)."""
    import csv as _csv
    import io as _io

    reader = _csv.reader(_io.StringIO(text))
    header = next(reader)
    if header[:2] != ["reader_id", "trial_id"]:
        raise ValueError("baseline CSV must start with reader_id,trial_id")
    out = _io.StringIO()
    out.write(",".join(["reader_id", "trial_id", "label"] + header[2:]) + "\n")
    for row in reader:
        if not row:
            continue
        label = corpus.label_of.get((row[0], row[1]))
        out.write(
            ",".join([row[0], row[1], "" if label is None else str(label)] + row[2:]) + "\n"
        )
    return out.getvalue()


def make_classifier(model: str, params: dict, seed: int):
    if model.endswith("svm"):
        svm = SVC(
            kernel=params["kernel"],
            C=params["svm_c"],
            gamma=params["svm_gamma"] if params["svm_gamma"] is not None else "scale",
        )
        return Pipeline([("scale", StandardScaler()), ("svm", svm)])
    forest = RandomForestClassifier(
        n_estimators=params["rf_n_estimators"],
        max_depth=params["rf_max_depth"],
        random_state=seed % (2**32),
    )
    return Pipeline([("forest", forest)])


def decision_scores(classifier, matrix: np.ndarray) -> np.ndarray:
    if hasattr(classifier, "decision_function"):
        try:
            return classifier.decision_function(matrix)
        except AttributeError:
            pass
    return classifier.predict_proba(matrix)[:, 1]


def _score_split(
    producer,
    params: dict,
    model: str,
    fit_units,
    eval_units,
    input_units,
    clf_seed: int,
) -> float:
    assert_fold_clean(fit_units, eval_units, "feature/classifier fit vs eval")
    frame = producer(params, fit_units=fit_units, input_units=input_units)
    fit_rows = frame.rows_for(set(fit_units))
    eval_rows = frame.rows_for(set(eval_units))
    classifier = make_classifier(model, params, clf_seed)
    classifier.fit(frame.matrix[fit_rows], frame.labels[fit_rows].astype(int))
    scores = decision_scores(classifier, frame.matrix[eval_rows])
    return float(roc_auc_score(frame.labels[eval_rows].astype(int), scores))


def nested_cv(
    producer,
    plan: CvPlan,
    space: SearchSpace,
    model: str,
    seed: int,
    inner_k: int = 3,
    iterations: int | None = None,
    jobs: int = 1,
) -> NestedCvResult:
    """Outer loop over ``plan``; randomized search in grouped inner folds."""
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")
    iterations = space.iterations if iterations is None else iterations
    outcomes = []
    for fold in range(plan.k):
        outer_train = plan.train_units(fold)
        outer_test = plan.test_units(fold)
        assert_fold_clean(outer_train, outer_test, f"outer fold {fold}")
        fold_seed = derive_seed(seed, "fold", fold, model)
        rng = np.random.default_rng(fold_seed)
        candidates = [sample_hyperparameters(space, rng) for _ in range(iterations)]
        inner_plan = build_folds(
            outer_train,
            producer.unit_labels(outer_train),
            producer.unit_groups(outer_train),
            inner_k,
            seed=derive_seed(fold_seed, "inner"),
        )

        def evaluate(task):
            candidate_index, inner_fold = task
            return _score_split(
                producer,
                candidates[candidate_index],
                model,
                fit_units=inner_plan.train_units(inner_fold),
                eval_units=inner_plan.test_units(inner_fold),
                input_units=outer_train,
                clf_seed=derive_seed(fold_seed, "clf", candidate_index, inner_fold),
            )

        tasks = [(c, f) for c in range(iterations) for f in range(inner_k)]
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                flat = list(pool.map(evaluate, tasks))
        else:
            flat = [evaluate(task) for task in tasks]
        inner_scores = np.array(flat).reshape(iterations, inner_k).mean(axis=1)
        best_index = int(np.argmax(inner_scores))

        auc = _score_split(
            producer,
            candidates[best_index],
            model,
            fit_units=outer_train,
            eval_units=outer_test,
            input_units=plan.units,
            clf_seed=derive_seed(fold_seed, "refit"),
        )
        outcomes.append(
            FoldOutcome(
                fold=fold,
                roc_auc=auc,
                best_params=candidates[best_index],
                best_inner_score=float(inner_scores[best_index]),
            )
        )
    return NestedCvResult(model=model, outcomes=tuple(outcomes))


# ---------------------------------------------------------------------------
# experiment-level plumbing


def build_plan(producer, k: int, seed: int) -> CvPlan:
    units = producer.units()
    return build_folds(
        units,
        producer.unit_labels(units),
        producer.unit_groups(units),
        k,
        seed=derive_seed(seed, "outer"),
    )


def permuted_reader_labels(corpus: CorpusIndex, seed: int) -> CorpusIndex:
    """Corpus copy with reader labels shuffled uniformly (counts preserved)."""
    readers = corpus.readers()
    labels = [corpus.reader_label(reader) for reader in readers]
    if any(label is None for label in labels):
        raise ValueError("permutation requires a fully labeled corpus")
    rng = np.random.default_rng(derive_seed(seed, "permutation"))
    shuffled = [labels[int(i)] for i in rng.permutation(len(labels))]
    return corpus.with_labels(dict(zip(readers, shuffled)))


def result_row(
    result: NestedCvResult,
    setting: str = "including_l2",
    persistence: str = "ordinary",
) -> dict:
    return {
        "model": result.model,
        "setting": setting,
        "persistence": persistence,
        "mean_roc_auc": round(result.mean_roc_auc, 4),
        "std_roc_auc": round(result.std_roc_auc, 4),
        "fold_scores": [round(score, 4) for score in result.fold_scores],
        "best_filtrations": result.best_kinds,
        "best_params": [
            {key: outcome.best_params[key] for key in sorted(outcome.best_params)}
            for outcome in result.outcomes
        ],
    }


def text_table(rows) -> str:
    header = ("model", "setting", "persistence", "mean ROC AUC", "std")
    body = [
        (
            row["model"],
            row["setting"],
            row["persistence"],
            f"{row['mean_roc_auc']:.2f}",
            f"{row['std_roc_auc']:.2f}",
        )
        for row in rows
    ]
    widths = [max(len(str(line[i])) for line in [header, *body]) for i in range(len(header))]
    lines = [
        "  ".join(str(cell).ljust(width) for cell, width in zip(line, widths)).rstrip()
        for line in [header, *body]
    ]
    lines.insert(1, "  ".join("-" * width for width in widths))
    return "\n".join(lines) + "\n"
