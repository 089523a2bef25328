"""Extended persistent homology of a filtered path via a two-phase sweep.

The input is a series whose filtration values are monotone between
consecutive vertices, so the connected components of any sublevel set
correspond to maximal runs of consecutive vertices at or below the
threshold. Sweeping the threshold upward births a component at every local
minimum and merges two components at every interior local maximum; when two
components merge, the one born earlier survives and the younger one dies,
yielding one (birth, death) point per merge (the ordinary diagram). The
downward sweep over superlevel sets mirrors this with the order reversed
(elder means born at a larger value) and yields the relative diagram, minus
the component born at the global maximum: that birth event is consumed as
the death of the never-dying component from the first phase, giving the
single essential point (global min, global max).

Exact ties are handled by collapsing adjacent equal-value plateaus to one
vertex and ordering the rest lexicographically by (value, vertex index).
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import TieUnresolvedError
from .filtration import AugmentedSeries

# Test hook for the golden checks: when set, the downward sweep uses the
# wrong elder orientation, which must break the reflection duality.
_DOWNWARD_ELDER_FLIPPED = False


@contextlib.contextmanager
def corrupted_downward_elder_rule() -> Iterator[None]:
    """Deliberately mis-orient the elder rule of the downward sweep (tests only)."""
    global _DOWNWARD_ELDER_FLIPPED
    _DOWNWARD_ELDER_FLIPPED = True
    try:
        yield
    finally:
        _DOWNWARD_ELDER_FLIPPED = False


@dataclass(frozen=True)
class DiagramPoint:
    """A (birth, death) pair with the vertex indices that produced it."""

    birth: float
    death: float
    birth_index: int
    death_index: int

    @property
    def persistence(self) -> float:
        return self.death - self.birth

    @property
    def pair(self) -> tuple[float, float]:
        return (self.birth, self.death)


@dataclass(frozen=True)
class ExtendedDiagram:
    """Ordinary, relative and essential diagrams of one filtered series."""

    ordinary: tuple[DiagramPoint, ...]
    relative: tuple[DiagramPoint, ...]
    essential: DiagramPoint


def critical_profile(
    series: AugmentedSeries,
) -> list[tuple[int, float, str]]:
    """Classify every vertex as ``min``, ``max`` or ``regular`` along the filtration.

    Endpoints count as one-sided extrema. Raises TieUnresolvedError when two
    adjacent vertices share a filtration value; collapse plateaus first.
    """
    values = [float(v) for v in series.filtration]
    for i in range(len(values) - 1):
        if values[i] == values[i + 1]:
            raise TieUnresolvedError(
                f"adjacent vertices {i} and {i + 1} share filtration value {values[i]}"
            )
    profile = []
    n = len(values)
    for i, value in enumerate(values):
        below_prev = i > 0 and value < values[i - 1]
        below_next = i < n - 1 and value < values[i + 1]
        above_prev = i > 0 and value > values[i - 1]
        above_next = i < n - 1 and value > values[i + 1]
        if n == 1:
            kind = "min"
        elif i == 0:
            kind = "min" if below_next else "max"
        elif i == n - 1:
            kind = "min" if below_prev else "max"
        elif below_prev and below_next:
            kind = "min"
        elif above_prev and above_next:
            kind = "max"
        else:
            kind = "regular"
        profile.append((i, value, kind))
    return profile


def sublevel_sweep(
    series: AugmentedSeries,
) -> tuple[tuple[DiagramPoint, ...], float]:
    """Upward sweep: finite ordinary points plus the birth of the surviving component."""
    values, indices = _collapse_plateaus(series.filtration)
    pairs, survivor = _sweep(values, indices, descending=False)
    return _sorted_points(pairs), survivor[0]


def extended_persistence(series: AugmentedSeries) -> ExtendedDiagram:
    """Both sweep phases: ordinary, relative and essential diagrams."""
    values, indices = _collapse_plateaus(series.filtration)
    ordinary, up_survivor = _sweep(values, indices, descending=False)
    relative, down_survivor = _sweep(values, indices, descending=True)
    essential = DiagramPoint(
        birth=up_survivor[0],
        death=down_survivor[0],
        birth_index=up_survivor[1],
        death_index=down_survivor[1],
    )
    return ExtendedDiagram(
        ordinary=_sorted_points(ordinary),
        relative=_sorted_points(relative),
        essential=essential,
    )


def ordinary_only(
    series: AugmentedSeries,
    infinite_policy: str = "drop",
) -> tuple[DiagramPoint, ...]:
    """Ordinary persistence only; the surviving component is dropped or kept with death inf."""
    if infinite_policy not in ("drop", "keep-with-infinite-death"):
        raise ValueError(f"unknown infinite_policy {infinite_policy!r}")
    values, indices = _collapse_plateaus(series.filtration)
    pairs, survivor = _sweep(values, indices, descending=False)
    points = list(pairs)
    if infinite_policy == "keep-with-infinite-death":
        points.append(
            DiagramPoint(
                birth=survivor[0], death=math.inf, birth_index=survivor[1], death_index=-1
            )
        )
    return _sorted_points(points)


def points_array(points: Sequence[DiagramPoint]) -> list[tuple[float, float]]:
    """The (birth, death) pairs of a diagram, in serialization order."""
    return [p.pair for p in points]


# ---------------------------------------------------------------------------
# serialization


def diagram_record(
    kind: str,
    points: Sequence[DiagramPoint] = (),
    essential: DiagramPoint | None = None,
) -> dict:
    """JSON-ready record {kind, points, essential}; infinite deaths become "inf"."""
    return {
        "kind": kind,
        "points": [{"birth": p.birth, "death": _encode(p.death)} for p in points],
        "essential": None
        if essential is None
        else {"birth": essential.birth, "death": _encode(essential.death)},
    }


def extended_records(diagram: ExtendedDiagram) -> list[dict]:
    """One record per diagram of an extended persistence computation."""
    return [
        diagram_record("ordinary", diagram.ordinary),
        diagram_record("relative", diagram.relative),
        diagram_record("essential", essential=diagram.essential),
    ]


def record_pairs(record: dict) -> list[tuple[float, float]]:
    """Decode the (birth, death) pairs of one serialized record."""
    if record.get("kind") == "essential":
        ess = record["essential"]
        return [(float(ess["birth"]), _decode(ess["death"]))]
    return [(float(p["birth"]), _decode(p["death"])) for p in record["points"]]


def _encode(death: float) -> float | str:
    return "inf" if math.isinf(death) else death


def _decode(death: float | str) -> float:
    return math.inf if death == "inf" else float(death)


# ---------------------------------------------------------------------------
# sweep machinery


def _collapse_plateaus(filtration) -> tuple[list[float], list[int]]:
    """Drop vertices equal to their predecessor; keep the first index of each run."""
    values: list[float] = []
    indices: list[int] = []
    for i, value in enumerate(float(v) for v in filtration):
        if values and value == values[-1]:
            continue
        values.append(value)
        indices.append(i)
    return values, indices


def _sweep(
    values: list[float],
    indices: list[int],
    descending: bool,
) -> tuple[list[DiagramPoint], tuple[float, int]]:
    """Union-find sweep over a path; returns merge pairs and the surviving birth.

    Vertices are processed in lexicographic (value, index) order, ascending
    for sublevel sets and descending for superlevel sets. Each merge kills
    the younger component (larger birth when ascending, smaller when
    descending) and records its (birth, death) pair.
    """
    n = len(values)
    order = sorted(range(n), key=lambda p: (values[p], indices[p]), reverse=descending)
    parent = list(range(n))
    birth_value = [0.0] * n
    birth_index = [0] * n
    active = [False] * n

    def find(p: int) -> int:
        root = p
        while parent[root] != root:
            root = parent[root]
        while parent[p] != root:
            parent[p], p = root, parent[p]
        return root

    flip = descending and _DOWNWARD_ELDER_FLIPPED
    larger_birth_survives = descending != flip

    pairs: list[DiagramPoint] = []
    for pos in order:
        left = pos - 1 if pos > 0 and active[pos - 1] else None
        right = pos + 1 if pos + 1 < n and active[pos + 1] else None
        active[pos] = True
        if left is None and right is None:
            # local extremum opening the sweep direction: a component is born
            birth_value[pos] = values[pos]
            birth_index[pos] = indices[pos]
        elif left is not None and right is not None:
            # interior extremum closing the sweep direction: two components merge
            root_a, root_b = find(left), find(right)
            if root_a == root_b:
                parent[pos] = root_a
                continue
            key_a = (birth_value[root_a], birth_index[root_a])
            key_b = (birth_value[root_b], birth_index[root_b])
            if (key_a > key_b) == larger_birth_survives:
                keep, kill = root_a, root_b
            else:
                keep, kill = root_b, root_a
            pairs.append(
                DiagramPoint(
                    birth=birth_value[kill],
                    death=values[pos],
                    birth_index=birth_index[kill],
                    death_index=indices[pos],
                )
            )
            parent[kill] = keep
            parent[pos] = keep
        else:
            parent[pos] = find(left if left is not None else right)

    root = find(order[0])
    return pairs, (birth_value[root], birth_index[root])


def _sorted_points(points) -> tuple[DiagramPoint, ...]:
    return tuple(sorted(points, key=lambda p: (p.birth, p.death, p.birth_index)))
