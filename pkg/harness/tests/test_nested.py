import json
from pathlib import Path

import numpy as np
import pytest
from sklearn.metrics import roc_auc_score

from tsh_harness.nested import (
    BaselineProducer,
    CorePipelineProducer,
    FoldLeakageError,
    assert_fold_clean,
    build_plan,
    nested_cv,
    permuted_reader_labels,
    result_row,
    text_table,
)
from tsh_harness.pipeline_client import CorpusIndex, run_core_features
from tsh_harness.search import SearchSpace
from tsh_harness.synthetic import ClassParams, generate_synthetic_corpus

SMALL_CONFIG = {
    "image": {"bandwidth_sigma": 0.02, "resolution": [8, 8]},
    "pca_components": 6,
    "min_fixations": 5,
}


@pytest.fixture(scope="module")
def corpus() -> CorpusIndex:
    text = generate_synthetic_corpus(
        8, 2, (ClassParams(regression_rate=0.0), ClassParams(regression_rate=0.45)), seed=9
    )
    return CorpusIndex(text)


def write_baseline(corpus: CorpusIndex, path: Path, separable=True, seed=0) -> Path:
    rng = np.random.default_rng(seed)
    lines = ["reader_id,trial_id,f0,f1"]
    for reader_id, trial_id in corpus.keys:
        label = corpus.label_of[(reader_id, trial_id)]
        signal = float(label) if separable else float(rng.random())
        lines.append(f"{reader_id},{trial_id},{signal + rng.normal(0, 0.01)},{rng.normal()}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


class TestCorpusIndex:
    def test_keys_and_subset(self, corpus):
        assert len(corpus.keys) == 16
        subset = corpus.subset_text(corpus.keys[:3])
        sliced = CorpusIndex(subset)
        assert sliced.keys == corpus.keys[:3]

    def test_relabel(self, corpus):
        flipped = corpus.with_labels({r: 1 for r in corpus.readers()})
        assert {flipped.reader_label(r) for r in flipped.readers()} == {1}

    def test_permutation_preserves_counts(self, corpus):
        permuted = permuted_reader_labels(corpus, seed=3)
        original = sorted(corpus.reader_label(r) for r in corpus.readers())
        shuffled = sorted(permuted.reader_label(r) for r in permuted.readers())
        assert original == shuffled


class TestCoreClient:
    def test_run_core_features(self, corpus, tmp_path):
        input_csv = tmp_path / "corpus.csv"
        input_csv.write_text(corpus.subset_text(corpus.keys), encoding="utf-8")
        frame = run_core_features(input_csv, SMALL_CONFIG, tmp_path)
        assert frame.keys == corpus.keys
        assert frame.matrix.shape[0] == 16
        assert frame.matrix.shape[1] <= 6

    def test_fit_ids_change_features(self, corpus, tmp_path):
        input_csv = tmp_path / "corpus.csv"
        input_csv.write_text(corpus.subset_text(corpus.keys), encoding="utf-8")
        full = run_core_features(input_csv, SMALL_CONFIG, tmp_path)
        half = run_core_features(
            input_csv, SMALL_CONFIG, tmp_path, fit_keys=corpus.keys[:8]
        )
        assert half.matrix.shape[0] == full.matrix.shape[0]
        assert not np.allclose(half.matrix[:, 0], full.matrix[:, 0])

    def test_hybrid_features_add_baseline_columns(self, corpus, tmp_path):
        input_csv = tmp_path / "corpus.csv"
        input_csv.write_text(corpus.subset_text(corpus.keys), encoding="utf-8")
        baseline = write_baseline(corpus, tmp_path / "baseline.csv")
        plain = run_core_features(input_csv, SMALL_CONFIG, tmp_path)
        hybrid = run_core_features(input_csv, SMALL_CONFIG, tmp_path, baseline_csv=baseline)
        assert hybrid.matrix.shape[1] == plain.matrix.shape[1] + 2


class TestLeakageGuard:
    def test_disjoint_ok(self):
        assert_fold_clean([("a", "1")], [("b", "1")], "test")

    def test_overlap_raises(self):
        with pytest.raises(FoldLeakageError):
            assert_fold_clean([("a", "1")], [("a", "1")], "test")


class TestNestedCvOnBaseline:
    def make_producer(self, corpus, tmp_path, separable=True):
        baseline = write_baseline(corpus, tmp_path / "baseline.csv", separable=separable)
        return BaselineProducer(corpus, baseline, level="trial")

    def test_perfectly_separable_scores_one(self, corpus, tmp_path):
        producer = self.make_producer(corpus, tmp_path)
        plan = build_plan(producer, k=3, seed=0)
        result = nested_cv(producer, plan, SearchSpace(), "bl-svm", seed=0, inner_k=2,
                           iterations=2)
        assert result.mean_roc_auc == 1.0

    def test_random_forest_model(self, corpus, tmp_path):
        producer = self.make_producer(corpus, tmp_path)
        plan = build_plan(producer, k=2, seed=0)
        result = nested_cv(producer, plan, SearchSpace(), "bl-rf", seed=0, inner_k=2,
                           iterations=1)
        assert result.mean_roc_auc == 1.0

    def test_deterministic_given_seed(self, corpus, tmp_path):
        producer = self.make_producer(corpus, tmp_path, separable=False)
        plan = build_plan(producer, k=2, seed=1)
        a = nested_cv(producer, plan, SearchSpace(), "bl-svm", seed=4, inner_k=2, iterations=3)
        b = nested_cv(producer, plan, SearchSpace(), "bl-svm", seed=4, inner_k=2, iterations=3)
        assert a.fold_scores == b.fold_scores
        assert [o.best_params for o in a.outcomes] == [o.best_params for o in b.outcomes]

    def test_reader_level_mean_aggregation(self, corpus, tmp_path):
        baseline = write_baseline(corpus, tmp_path / "baseline.csv", separable=False, seed=5)
        producer = BaselineProducer(corpus, baseline, level="reader")
        units = producer.units()
        frame = producer({}, fit_units=units, input_units=units)
        trial_producer = BaselineProducer(corpus, baseline, level="trial")
        trial_frame = trial_producer({}, fit_units=corpus.keys, input_units=corpus.keys)
        for row, (reader, _) in enumerate(frame.keys):
            rows = [i for i, key in enumerate(trial_frame.keys) if key[0] == reader]
            manual = trial_frame.matrix[rows].mean(axis=0)
            assert np.allclose(frame.matrix[row], manual, atol=1e-12)
            shuffled = trial_frame.matrix[rows[::-1]].mean(axis=0)
            assert np.allclose(frame.matrix[row], shuffled, atol=1e-12)


class TestNestedCvOnCore:
    def test_tsh_svm_end_to_end(self, corpus, tmp_path):
        producer = CorePipelineProducer(corpus, SMALL_CONFIG, tmp_path, level="trial")
        plan = build_plan(producer, k=2, seed=0)
        result = nested_cv(
            producer, plan, SearchSpace(), "tsh-svm", seed=0, inner_k=2, iterations=1, jobs=2
        )
        assert len(result.outcomes) == 2
        assert all(0.0 <= score <= 1.0 for score in result.fold_scores)
        assert all("kind" in o.best_params for o in result.outcomes)


class TestReporting:
    def test_constant_classifier_auc_is_half(self):
        y = np.array([0, 1, 0, 1, 1, 0])
        assert roc_auc_score(y, np.zeros(6)) == 0.5

    def test_result_row_and_table(self, corpus, tmp_path):
        baseline = write_baseline(corpus, tmp_path / "baseline.csv")
        producer = BaselineProducer(corpus, baseline, level="trial")
        plan = build_plan(producer, k=2, seed=0)
        result = nested_cv(producer, plan, SearchSpace(), "bl-svm", seed=0, inner_k=2,
                           iterations=1)
        row = result_row(result, setting="including_l2", persistence="ordinary")
        assert set(row) >= {"model", "setting", "persistence", "mean_roc_auc", "std_roc_auc"}
        table = text_table([row])
        assert "bl-svm" in table and "mean ROC AUC" in table
        json.dumps(row)  # JSON-serializable
