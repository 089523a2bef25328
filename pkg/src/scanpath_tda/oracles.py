"""Independent reference computations backing the golden checks and tests.

Nothing here shares machinery with the production path it checks: the
persistence oracle re-derives diagrams by enumerating connected runs of
vertices at every distinct filtration level and tracking component
identities across levels, and the curved-filtration oracle replaces the
analytic critical-point insertion with a dense resampling of the filtration
along every segment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .filtration import FiltrationSpec, filtration_values, padded_range
from .timeseries import TimeSeries

Pair = tuple[float, float]


@dataclass(frozen=True)
class OracleDiagrams:
    """(birth, death) multisets from the reference computation, sorted."""

    ordinary: tuple[Pair, ...]
    relative: tuple[Pair, ...]
    essential: Pair


def from_extended(diagram) -> OracleDiagrams:
    """Project a production ExtendedDiagram onto sorted (birth, death) multisets."""
    return OracleDiagrams(
        ordinary=tuple(sorted(p.pair for p in diagram.ordinary)),
        relative=tuple(sorted(p.pair for p in diagram.relative)),
        essential=diagram.essential.pair,
    )


def level_sweep_extended(values) -> OracleDiagrams:
    """Extended persistence by explicit component enumeration at every level.

    The input is the filtration value per vertex of a path whose filtration
    is monotone between consecutive vertices; local extrema are assumed to
    have pairwise distinct values.
    """
    values = [float(v) for v in values]
    ordinary, low_birth = _level_phase(values, superlevel=False)
    relative, high_birth = _level_phase(values, superlevel=True)
    return OracleDiagrams(
        ordinary=tuple(sorted(ordinary)),
        relative=tuple(sorted(relative)),
        essential=(low_birth, high_birth),
    )


def _level_phase(values: list[float], superlevel: bool) -> tuple[list[Pair], float]:
    """One sweep phase over levels; returns merge pairs and the surviving birth."""
    n = len(values)
    levels = sorted(set(values), reverse=superlevel)
    previous: list[tuple[int, int, float]] = []  # (start, end, birth) runs
    pairs: list[Pair] = []
    for level in levels:
        if superlevel:
            active = [v >= level for v in values]
        else:
            active = [v <= level for v in values]
        runs: list[tuple[int, int]] = []
        i = 0
        while i < n:
            if active[i]:
                j = i
                while j + 1 < n and active[j + 1]:
                    j += 1
                runs.append((i, j))
                i = j + 1
            else:
                i += 1
        merged: list[tuple[int, int, float]] = []
        cursor = 0  # previous runs are sorted and each nests in exactly one new run
        for start, end in runs:
            inside = []
            while cursor < len(previous) and previous[cursor][0] <= end:
                inside.append(previous[cursor])
                cursor += 1
            if not inside:
                merged.append((start, end, level))
            elif len(inside) == 1:
                merged.append((start, end, inside[0][2]))
            else:
                births = [r[2] for r in inside]
                survivor = max(births) if superlevel else min(births)
                for birth in births:
                    if birth != survivor:
                        pairs.append((birth, level))
                merged.append((start, end, survivor))
        previous = merged
    assert len(previous) == 1, "a path must end as a single component"
    return pairs, previous[0][2]


def dense_resampled_extended(
    ts: TimeSeries,
    spec: FiltrationSpec,
    samples_per_segment: int = 100_000,
) -> OracleDiagrams:
    """Extended persistence from a dense resampling of the filtration.

    Every straight segment of the series is resampled at uniformly spaced
    points (endpoints included), the filtration is evaluated at all samples,
    and persistence is computed from the local extrema of the sampled
    values via the level oracle. This sidesteps the analytic interior
    critical point formulas entirely.
    """
    if len(ts) < 2:
        raise ValueError("need a series of length >= 2")
    value_range = padded_range(ts, spec.padding_eps)
    base = np.linspace(0.0, 1.0, samples_per_segment + 1)
    t_parts = [np.array([ts.t[0]])]
    x_parts = [np.array([ts.x[0]])]
    for i in range(len(ts) - 1):
        t_parts.append(ts.t[i] + (ts.t[i + 1] - ts.t[i]) * base[1:])
        x_parts.append(ts.x[i] + (ts.x[i + 1] - ts.x[i]) * base[1:])
    t_all = np.concatenate(t_parts)
    x_all = np.concatenate(x_parts)
    sampled = filtration_values(spec, value_range, t_all, x_all)
    return level_sweep_extended(extrema_values(sampled))


def extrema_values(values: np.ndarray) -> np.ndarray:
    """Reduce a sampled sequence to its local extrema (endpoints included).

    Exact adjacent duplicates are collapsed first. Persistence of a
    piecewise-monotone sequence depends only on this subsequence.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return values
    keep = np.concatenate(([True], np.diff(values) != 0.0))
    values = values[keep]
    if values.size <= 2:
        return values
    rising = np.sign(np.diff(values))
    turning = np.nonzero(rising[1:] != rising[:-1])[0] + 1
    return values[np.concatenate(([0], turning, [values.size - 1]))]


def pairs_close(a, b, tol: float) -> bool:
    """Whether two (birth, death) multisets match within tol in sup norm.

    Points may also match the diagonal when their half-persistence is
    within tol, absorbing near-diagonal artifacts of sampled inputs. This
    is a feasibility check for bottleneck distance <= tol.
    """
    a = [tuple(map(float, p)) for p in a]
    b = [tuple(map(float, p)) for p in b]
    if not a and not b:
        return True
    na, nb = len(a), len(b)
    size = na + nb
    cost = np.ones((size, size))
    for i, (b1, d1) in enumerate(a):
        for j, (b2, d2) in enumerate(b):
            if max(abs(b1 - b2), abs(d1 - d2)) <= tol:
                cost[i, j] = 0.0
        if abs(d1 - b1) / 2.0 <= tol:
            cost[i, nb:] = 0.0
    for j, (b2, d2) in enumerate(b):
        if abs(d2 - b2) / 2.0 <= tol:
            cost[na:, j] = 0.0
    cost[na:, nb:] = 0.0
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].sum()) == 0.0


def diagrams_close(a: OracleDiagrams, b: OracleDiagrams, tol: float) -> bool:
    """Ordinary, relative and essential diagrams all match within tol."""
    ess = max(
        abs(a.essential[0] - b.essential[0]),
        abs(a.essential[1] - b.essential[1]),
    )
    return (
        ess <= tol
        and pairs_close(a.ordinary, b.ordinary, tol)
        and pairs_close(a.relative, b.relative, tol)
    )
