"""Fixation sequences and the univariate time series derived from them.

A trial is recorded as a sequence of fixations (onset, x, y) with strictly
increasing onsets. Splitting it along the two screen axes yields two
univariate time series, one per coordinate, which are min-max scaled before
any filtration is applied.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

from .errors import DegenerateRangeError, ParseError, SchemaError, ValidationError

# Logical field -> CSV column name. Callers may override individual entries
# to ingest corpora with different headers.
DEFAULT_SCHEMA: Mapping[str, str] = {
    "reader_id": "reader_id",
    "trial_id": "trial_id",
    "onset_ms": "onset_ms",
    "x_px": "x_px",
    "y_px": "y_px",
    "label": "label",
}

_REQUIRED = ("reader_id", "trial_id", "onset_ms", "x_px", "y_px")


@dataclass(frozen=True)
class Fixation:
    """One fixation: onset in milliseconds and gaze position in pixels."""

    onset_ms: float
    x_px: float
    y_px: float

    def __post_init__(self) -> None:
        for name in ("onset_ms", "x_px", "y_px"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ValidationError(f"fixation field {name} must be finite, got {value!r}")
        if self.onset_ms < 0:
            raise ValidationError(f"onset_ms must be >= 0, got {self.onset_ms!r}")


@dataclass(frozen=True)
class FixationSequence:
    """All fixations of one trial, in onset order, with an optional binary label."""

    reader_id: str
    trial_id: str
    fixations: tuple[Fixation, ...]
    label: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "fixations", tuple(self.fixations))
        if not self.fixations:
            raise ValidationError(
                f"trial ({self.reader_id!r}, {self.trial_id!r}) has no fixations"
            )
        onsets = [f.onset_ms for f in self.fixations]
        for previous, current in zip(onsets, onsets[1:]):
            if current <= previous:
                raise ValidationError(
                    f"onsets must be strictly increasing in trial "
                    f"({self.reader_id!r}, {self.trial_id!r}): {previous} then {current}"
                )
        if self.label is not None and self.label not in (0, 1):
            raise ValidationError(f"label must be 0 or 1, got {self.label!r}")

    def __len__(self) -> int:
        return len(self.fixations)

    @property
    def key(self) -> tuple[str, str]:
        return (self.reader_id, self.trial_id)


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Strictly time-ordered samples (t, x) of a univariate signal."""

    t: np.ndarray
    x: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.t, dtype=float).copy()
        x = np.asarray(self.x, dtype=float).copy()
        if t.ndim != 1 or x.ndim != 1 or t.shape != x.shape:
            raise ValidationError("t and x must be 1-d arrays of equal length")
        if t.size < 1:
            raise ValidationError("a time series needs at least one sample")
        if not (np.isfinite(t).all() and np.isfinite(x).all()):
            raise ValidationError("time series samples must be finite")
        if t.size > 1 and not (np.diff(t) > 0).all():
            raise ValidationError("times must be strictly increasing")
        t.setflags(write=False)
        x.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "x", x)

    def __len__(self) -> int:
        return int(self.t.size)


def parse_fixation_csv(
    raw: bytes | str | IO[bytes] | IO[str],
    schema: Mapping[str, str] | None = None,
) -> list[FixationSequence]:
    """Parse a fixation CSV into one FixationSequence per (reader, trial) group.

    Rows are grouped by reader and trial id in order of first appearance and
    sorted by onset within each group; duplicate onsets inside a group are
    rejected. The optional label column must be constant within a group.
    """
    columns = dict(DEFAULT_SCHEMA)
    if schema:
        columns.update(schema)

    text = _as_text(raw)
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise SchemaError("input has no header row")
    header = set(reader.fieldnames)
    for logical in _REQUIRED:
        if columns[logical] not in header:
            raise SchemaError(f"missing column {columns[logical]!r} (for {logical})")
    has_label = columns["label"] in header

    groups: dict[tuple[str, str], list[tuple[float, float, float, int | None]]] = {}
    for row in reader:
        line = reader.line_num
        key = (row[columns["reader_id"]], row[columns["trial_id"]])
        onset = _parse_float(row[columns["onset_ms"]], columns["onset_ms"], line)
        x = _parse_float(row[columns["x_px"]], columns["x_px"], line)
        y = _parse_float(row[columns["y_px"]], columns["y_px"], line)
        label: int | None = None
        if has_label:
            cell = (row[columns["label"]] or "").strip()
            if cell:
                if cell not in ("0", "1"):
                    raise ParseError(f"row {line}: label must be 0 or 1, got {cell!r}")
                label = int(cell)
        groups.setdefault(key, []).append((onset, x, y, label))

    sequences = []
    for (reader_id, trial_id), rows in groups.items():
        rows.sort(key=lambda r: r[0])
        for previous, current in zip(rows, rows[1:]):
            if current[0] == previous[0]:
                raise ValidationError(
                    f"duplicate onset {current[0]} in trial ({reader_id!r}, {trial_id!r})"
                )
        labels = {r[3] for r in rows if r[3] is not None}
        if len(labels) > 1:
            raise ValidationError(
                f"conflicting labels {sorted(labels)} in trial ({reader_id!r}, {trial_id!r})"
            )
        sequences.append(
            FixationSequence(
                reader_id=reader_id,
                trial_id=trial_id,
                fixations=tuple(Fixation(r[0], r[1], r[2]) for r in rows),
                label=labels.pop() if labels else None,
            )
        )
    return sequences


def write_fixation_csv(
    sequences: Iterable[FixationSequence],
    schema: Mapping[str, str] | None = None,
) -> str:
    """Serialize sequences back to the CSV schema; inverse of parse_fixation_csv."""
    columns = dict(DEFAULT_SCHEMA)
    if schema:
        columns.update(schema)
    sequences = list(sequences)
    include_label = any(s.label is not None for s in sequences)

    out = io.StringIO()
    fields = [columns[k] for k in _REQUIRED] + ([columns["label"]] if include_label else [])
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(fields)
    for seq in sequences:
        for fix in seq.fixations:
            row = [seq.reader_id, seq.trial_id, repr(fix.onset_ms), repr(fix.x_px), repr(fix.y_px)]
            if include_label:
                row.append("" if seq.label is None else str(seq.label))
            writer.writerow(row)
    return out.getvalue()


def split(seq: FixationSequence) -> tuple[TimeSeries, TimeSeries]:
    """Split a fixation sequence into its x- and y-coordinate time series."""
    t = np.array([f.onset_ms for f in seq.fixations])
    x = np.array([f.x_px for f in seq.fixations])
    y = np.array([f.y_px for f in seq.fixations])
    return TimeSeries(t, x), TimeSeries(t, y)


def minmax_scale(ts: TimeSeries, scale_time: bool = True) -> TimeSeries:
    """Affinely map values (and optionally times) onto [0, 1].

    Raises DegenerateRangeError when the values are constant; downstream
    filtrations are undefined on a zero-width range.
    """
    lo = float(ts.x.min())
    hi = float(ts.x.max())
    if hi <= lo:
        raise DegenerateRangeError(f"constant values (all equal {lo}); cannot min-max scale")
    x = (ts.x - lo) / (hi - lo)
    if scale_time:
        t0 = float(ts.t[0])
        t1 = float(ts.t[-1])
        if t1 <= t0:
            raise DegenerateRangeError("zero time span; cannot min-max scale the time axis")
        t = (ts.t - t0) / (t1 - t0)
    else:
        t = ts.t
    return TimeSeries(t, x)


def filter_trials(
    sequences: Sequence[FixationSequence], min_fixations: int
) -> list[FixationSequence]:
    """Keep only sequences with at least ``min_fixations`` fixations, in order."""
    if min_fixations < 1:
        raise ValueError(f"min_fixations must be >= 1, got {min_fixations}")
    return [s for s in sequences if len(s) >= min_fixations]


def _as_text(raw: bytes | str | IO[bytes] | IO[str]) -> str:
    if isinstance(raw, bytes):
        return raw.decode("utf-8")
    if isinstance(raw, str):
        return raw
    data = raw.read()
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


def _parse_float(cell: str, column: str, line: int) -> float:
    try:
        value = float(cell)
    except (TypeError, ValueError):
        raise ParseError(f"row {line}: column {column!r} is not numeric: {cell!r}") from None
    if not np.isfinite(value):
        raise ParseError(f"row {line}: column {column!r} is not finite: {cell!r}")
    return value
