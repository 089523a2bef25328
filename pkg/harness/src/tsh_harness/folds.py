"""Grouped stratified cross-validation plans.

Units (trials or readers) are assigned to folds at the group level so that
all trials of one reader land in a single fold, and group assignment is
stratified by label: within each class, shuffled groups go one by one to
the currently smallest fold. Deterministic under the seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np


class InfeasibleStratificationError(ValueError):
    """A label class has fewer groups than folds."""


@dataclass(frozen=True)
class CvPlan:
    """Fold assignment per unit plus the bookkeeping to slice train/test sets."""

    k: int
    fold_of: dict[Hashable, int]
    labels: dict[Hashable, int]
    groups: dict[Hashable, Hashable]

    @property
    def units(self) -> list:
        return list(self.fold_of)

    def test_units(self, fold: int) -> list:
        return [u for u, f in self.fold_of.items() if f == fold]

    def train_units(self, fold: int) -> list:
        return [u for u, f in self.fold_of.items() if f != fold]


def build_folds(
    units: Sequence[Hashable],
    labels: Sequence[int],
    groups: Sequence[Hashable],
    k: int,
    seed: int,
) -> CvPlan:
    if not (len(units) == len(labels) == len(groups)):
        raise ValueError("units, labels and groups must align")
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(set(units)) != len(units):
        raise ValueError("units must be unique")

    group_label: dict[Hashable, int] = {}
    group_units: dict[Hashable, list] = {}
    for unit, label, group in zip(units, labels, groups):
        if label not in (0, 1):
            raise ValueError(f"labels must be binary, got {label!r} for {unit!r}")
        if group in group_label and group_label[group] != label:
            raise ValueError(f"group {group!r} mixes labels")
        group_label[group] = label
        group_units.setdefault(group, []).append(unit)

    by_class: dict[int, list] = {0: [], 1: []}
    for group in group_units:
        by_class[group_label[group]].append(group)
    for label, members in by_class.items():
        if members and len(members) < k:
            raise InfeasibleStratificationError(
                f"class {label} has {len(members)} groups but k={k}"
            )

    rng = np.random.default_rng(seed)
    fold_sizes = [0] * k
    fold_of: dict[Hashable, int] = {}
    for label in (1, 0):
        members = sorted(by_class[label], key=str)
        order = rng.permutation(len(members))
        class_counts = [0] * k
        for index in order:
            group = members[int(index)]
            # per-class group counts stay within one of each other across
            # folds (stratification); unit counts break ties (balance)
            fold = min(range(k), key=lambda f: (class_counts[f], fold_sizes[f], f))
            class_counts[fold] += 1
            for unit in group_units[group]:
                fold_of[unit] = fold
                fold_sizes[fold] += 1

    ordered = {unit: fold_of[unit] for unit in units}
    return CvPlan(
        k=k,
        fold_of=ordered,
        labels=dict(zip(units, labels)),
        groups=dict(zip(units, groups)),
    )
