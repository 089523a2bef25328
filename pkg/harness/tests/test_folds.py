import pytest

from tsh_harness.folds import InfeasibleStratificationError, build_folds


def reader_units(n_readers, dyslexic, trials_per_reader=1):
    units, labels, groups = [], [], []
    for r in range(n_readers):
        label = 1 if r < dyslexic else 0
        for t in range(trials_per_reader):
            units.append((f"r{r:02d}", f"t{t:02d}"))
            labels.append(label)
            groups.append(f"r{r:02d}")
    return units, labels, groups


class TestBuildFolds:
    def test_reader_level_53_18_k10(self):
        units, labels, groups = reader_units(53, 18)
        plan = build_folds(units, labels, groups, k=10, seed=0)
        for fold in range(10):
            dyslexic = sum(1 for u in plan.test_units(fold) if plan.labels[u] == 1)
            assert 1 <= dyslexic <= 2

    def test_single_fold_contains_everything(self):
        units, labels, groups = reader_units(6, 3)
        plan = build_folds(units, labels, groups, k=1, seed=0)
        assert sorted(plan.test_units(0)) == sorted(units)
        assert plan.train_units(0) == []

    def test_no_reader_spans_two_folds(self):
        units, labels, groups = reader_units(12, 5, trials_per_reader=7)
        plan = build_folds(units, labels, groups, k=4, seed=3)
        for reader in set(groups):
            folds = {plan.fold_of[u] for u in units if u[0] == reader}
            assert len(folds) == 1

    def test_partition_properties(self):
        units, labels, groups = reader_units(20, 8, trials_per_reader=3)
        plan = build_folds(units, labels, groups, k=5, seed=7)
        seen = []
        for fold in range(5):
            test = plan.test_units(fold)
            train = plan.train_units(fold)
            assert not set(test) & set(train)
            assert sorted(test + train) == sorted(units)
            seen.extend(test)
        assert sorted(seen) == sorted(units)

    def test_every_fold_has_both_classes(self):
        units, labels, groups = reader_units(40, 20, trials_per_reader=2)
        plan = build_folds(units, labels, groups, k=5, seed=11)
        for fold in range(5):
            fold_labels = {plan.labels[u] for u in plan.test_units(fold)}
            assert fold_labels == {0, 1}

    def test_deterministic_under_seed(self):
        units, labels, groups = reader_units(16, 6, trials_per_reader=2)
        a = build_folds(units, labels, groups, k=4, seed=5)
        b = build_folds(units, labels, groups, k=4, seed=5)
        c = build_folds(units, labels, groups, k=4, seed=6)
        assert a.fold_of == b.fold_of
        assert a.fold_of != c.fold_of

    def test_infeasible_stratification(self):
        units, labels, groups = reader_units(12, 3)
        with pytest.raises(InfeasibleStratificationError):
            build_folds(units, labels, groups, k=5, seed=0)

    def test_mixed_label_group_rejected(self):
        with pytest.raises(ValueError, match="mixes labels"):
            build_folds(["a", "b"], [0, 1], ["g", "g"], k=1, seed=0)

    def test_non_binary_label_rejected(self):
        with pytest.raises(ValueError, match="binary"):
            build_folds(["a"], [2], ["g"], k=1, seed=0)
