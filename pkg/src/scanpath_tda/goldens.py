"""Built-in golden and oracle checks behind the ``goldens`` subcommand.

The worked six-fixation example trial pins the exact diagram coordinates;
the oracle suites re-derive diagrams on random series through the level
oracle and the dense-resampling oracle; two mutation checks corrupt the
implementation on purpose and verify that the corresponding check catches
the corruption.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .filtration import FiltrationSpec, augment
from .oracles import (
    dense_resampled_extended,
    diagrams_close,
    from_extended,
    level_sweep_extended,
)
from .persistence import corrupted_downward_elder_rule, extended_persistence
from .timeseries import Fixation, FixationSequence, TimeSeries, minmax_scale, split

TABLE1_SEQUENCE = FixationSequence(
    reader_id="example",
    trial_id="1",
    fixations=(
        Fixation(0.0, 963.1, 533.0),
        Fixation(244.0, 210.7, 95.4),
        Fixation(366.0, 100.0, 130.8),
        Fixation(726.0, 457.2, 124.3),
        Fixation(984.0, 569.6, 120.7),
        Fixation(1415.0, 281.6, 136.6),
    ),
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _random_series(rng: np.random.Generator, length: int) -> TimeSeries:
    t = np.sort(rng.uniform(0.0, 1.0, size=length))
    while length > 1 and (np.diff(t) <= 0).any():
        t = np.sort(rng.uniform(0.0, 1.0, size=length))
    return TimeSeries(t, rng.uniform(0.0, 1.0, size=length))


def _view(series):
    return from_extended(extended_persistence(series))


def check_fig2_golden() -> CheckResult:
    xs, _ = split(TABLE1_SEQUENCE)
    series = augment(xs, FiltrationSpec(kind="horizontal", padding_eps=0.0))
    diagram = extended_persistence(series)
    expected_ordinary = [(281.6, 569.6)]
    expected_relative = [(569.6, 100.0)]
    ok = (
        [p.pair for p in diagram.ordinary] == expected_ordinary
        and [p.pair for p in diagram.relative] == expected_relative
        and diagram.essential.pair == (100.0, 963.1)
    )
    return CheckResult("fig2-golden", ok, "" if ok else f"got {diagram}")


def check_scaled_golden() -> CheckResult:
    xs, _ = split(TABLE1_SEQUENCE)
    scaled = minmax_scale(xs)
    series = augment(scaled, FiltrationSpec(kind="horizontal", padding_eps=0.0))
    diagram = extended_persistence(series)
    low, width = 100.0, 963.1 - 100.0
    expected = ((281.6 - low) / width, (569.6 - low) / width)
    got = diagram.ordinary[0].pair if diagram.ordinary else None
    ok = got is not None and max(abs(got[0] - expected[0]), abs(got[1] - expected[1])) <= 1e-12
    return CheckResult("scaled-golden", ok, "" if ok else f"got {got}, want {expected}")


def check_level_oracle(n_series: int = 200, seed: int = 0) -> CheckResult:
    rng = np.random.default_rng(seed)
    specs = [
        FiltrationSpec(kind="horizontal"),
        FiltrationSpec(kind="sloped", slope_c=1.0),
        FiltrationSpec(kind="sloped", slope_c=-2.0),
    ]
    for index in range(n_series):
        ts = _random_series(rng, int(rng.integers(2, 65)))
        for spec in specs:
            series = augment(ts, spec)
            mine = _view(series)
            oracle = level_sweep_extended(series.filtration)
            if mine != oracle:
                return CheckResult(
                    "level-oracle", False, f"series {index} under {spec.kind.value}"
                )
    return CheckResult("level-oracle", True)


def check_reflection_and_reversal(n_series: int = 200, seed: int = 1) -> CheckResult:
    rng = np.random.default_rng(seed)
    horizontal = FiltrationSpec(kind="horizontal")
    for index in range(n_series):
        ts = _random_series(rng, int(rng.integers(2, 65)))
        forward = extended_persistence(augment(ts, horizontal))
        negated = extended_persistence(augment(TimeSeries(ts.t, -ts.x), horizontal))
        want = sorted((-p.birth, -p.death) for p in negated.ordinary)
        got = sorted(p.pair for p in forward.relative)
        if got != want:
            return CheckResult("reflection-duality", False, f"series {index}")
        backward = extended_persistence(augment(TimeSeries(ts.t, ts.x[::-1]), horizontal))
        if from_extended(forward) != from_extended(backward):
            return CheckResult("reflection-duality", False, f"reversal on series {index}")
    return CheckResult("reflection-duality", True)


def check_dense_sampling(
    n_series: int = 30,
    seed: int = 2,
    samples_per_segment: int = 20_000,
    augmenter: Callable | None = None,
) -> CheckResult:
    rng = np.random.default_rng(seed)
    augmenter = augmenter or augment
    for index in range(n_series):
        ts = _random_series(rng, int(rng.integers(2, 10)))
        for kind in ("sigmoid", "arctan"):
            for c in (-2.0, 0.5, 1.0):
                spec = FiltrationSpec(kind=kind, slope_c=c)
                mine = _view(augmenter(ts, spec))
                oracle = dense_resampled_extended(ts, spec, samples_per_segment)
                if not diagrams_close(mine, oracle, 1e-4):
                    return CheckResult(
                        "dense-sampling", False, f"series {index}, {kind}, c={c}"
                    )
    return CheckResult("dense-sampling", True)


def check_mutation_elder_rule() -> CheckResult:
    with corrupted_downward_elder_rule():
        broken = check_reflection_and_reversal(n_series=30, seed=3)
    ok = not broken.passed
    return CheckResult(
        "mutation-elder-rule",
        ok,
        "" if ok else "reflection-duality check survived a corrupted downward elder rule",
    )


def check_mutation_critical_insertion() -> CheckResult:
    def vertex_only_augment(ts, spec):
        return augment(ts, spec, vertex_only=True)

    broken = check_dense_sampling(
        n_series=20, seed=4, samples_per_segment=5_000, augmenter=vertex_only_augment
    )
    ok = not broken.passed
    return CheckResult(
        "mutation-critical-insertion",
        ok,
        "" if ok else "dense-sampling check survived skipped critical-point insertion",
    )


def run_goldens() -> list[CheckResult]:
    return [
        check_fig2_golden(),
        check_scaled_golden(),
        check_level_oracle(),
        check_reflection_and_reversal(),
        check_dense_sampling(),
        check_mutation_elder_rule(),
        check_mutation_critical_insertion(),
    ]
