"""File-based client for the scanpath-tda command line interface.

The harness consumes the core pipeline exclusively through its external
surfaces: the fixation CSV schema, the config JSON, the --fit-ids contract
and the feature CSV it emits. Every feature computation is one subprocess
invocation of ``python -m scanpath_tda features``.
"""

from __future__ import annotations

import csv
import io
import json
import subprocess
import sys
import uuid
from dataclasses import dataclass
from pathlib import Path

import numpy as np

Key = tuple[str, str]

CORPUS_HEADER = ["reader_id", "trial_id", "onset_ms", "x_px", "y_px", "label"]


class CoreInvocationError(RuntimeError):
    """The core CLI exited nonzero."""


@dataclass(frozen=True)
class FeatureFrame:
    """Parsed feature CSV: row keys, labels and the numeric matrix."""

    keys: list[Key]
    labels: np.ndarray
    matrix: np.ndarray

    def rows_for(self, keys: set[Key]) -> np.ndarray:
        index = {key: i for i, key in enumerate(self.keys)}
        return np.array([index[key] for key in sorted(keys)], dtype=int)


class CorpusIndex:
    """Fixation CSV held in memory, sliceable by (reader_id, trial_id) key."""

    def __init__(self, text: str):
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header is None or header[: len(CORPUS_HEADER) - 1] != CORPUS_HEADER[:-1]:
            raise ValueError(f"corpus CSV must start with columns {CORPUS_HEADER}")
        self.has_label = len(header) >= len(CORPUS_HEADER) and header[5] == "label"
        self.header = header
        self.rows_by_key: dict[Key, list[list[str]]] = {}
        self.label_of: dict[Key, int | None] = {}
        for row in reader:
            if not row:
                continue
            key = (row[0], row[1])
            self.rows_by_key.setdefault(key, []).append(row)
            if self.has_label and row[5] != "":
                self.label_of.setdefault(key, int(row[5]))
            else:
                self.label_of.setdefault(key, None)

    @classmethod
    def from_file(cls, path) -> "CorpusIndex":
        return cls(Path(path).read_text(encoding="utf-8"))

    @property
    def keys(self) -> list[Key]:
        return sorted(self.rows_by_key)

    def readers(self) -> list[str]:
        return sorted({reader for reader, _ in self.rows_by_key})

    def keys_of_readers(self, readers) -> list[Key]:
        readers = set(readers)
        return [key for key in self.keys if key[0] in readers]

    def reader_label(self, reader: str) -> int | None:
        labels = {
            self.label_of[key]
            for key in self.rows_by_key
            if key[0] == reader and self.label_of[key] is not None
        }
        if len(labels) > 1:
            raise ValueError(f"reader {reader!r} has conflicting labels")
        return labels.pop() if labels else None

    def subset_text(self, keys) -> str:
        out = io.StringIO()
        out.write(",".join(self.header) + "\n")
        for key in sorted(keys):
            for row in self.rows_by_key[key]:
                out.write(",".join(row) + "\n")
        return out.getvalue()

    def with_labels(self, label_of_reader: dict[str, int]) -> "CorpusIndex":
        """A copy with reader labels replaced (used by permutation runs)."""
        out = io.StringIO()
        out.write(",".join(self.header) + "\n")
        for key in self.keys:
            for row in self.rows_by_key[key]:
                patched = list(row)
                patched[5] = str(label_of_reader[key[0]])
                out.write(",".join(patched) + "\n")
        return CorpusIndex(out.getvalue())


def write_fit_ids(keys, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("reader_id,trial_id\n")
        for reader_id, trial_id in sorted(keys):
            handle.write(f"{reader_id},{trial_id}\n")


def run_core_features(
    input_csv: Path,
    config: dict,
    workdir: Path,
    fit_keys=None,
    baseline_csv: Path | None = None,
) -> FeatureFrame:
    """One ``scanpath-tda features`` invocation; returns the parsed feature CSV."""
    rundir = workdir / f"core_{uuid.uuid4().hex[:12]}"
    rundir.mkdir(parents=True)
    config_path = rundir / "config.json"
    config_path.write_text(json.dumps(config, sort_keys=True), encoding="utf-8")
    command = [
        sys.executable,
        "-m",
        "scanpath_tda",
        "features",
        "--input",
        str(input_csv),
        "--config",
        str(config_path),
        "--output-dir",
        str(rundir / "out"),
    ]
    if fit_keys is not None:
        fit_path = rundir / "fit_ids.csv"
        write_fit_ids(fit_keys, fit_path)
        command += ["--fit-ids", str(fit_path)]
    if baseline_csv is not None:
        command += ["--baseline-csv", str(baseline_csv)]
    result = subprocess.run(command, capture_output=True, text=True)
    if result.returncode != 0:
        raise CoreInvocationError(
            f"scanpath-tda features failed ({result.returncode}):\n{result.stderr}"
        )
    return parse_feature_csv((rundir / "out" / "features.csv").read_text(encoding="utf-8"))


def parse_feature_csv(text: str) -> FeatureFrame:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header[:3] != ["reader_id", "trial_id", "label"]:
        raise ValueError("feature CSV must start with reader_id,trial_id,label")
    keys: list[Key] = []
    labels: list[float] = []
    rows: list[list[float]] = []
    for row in reader:
        if not row:
            continue
        keys.append((row[0], row[1]))
        labels.append(float(row[2]) if row[2] != "" else np.nan)
        rows.append([float(cell) for cell in row[3:]])
    return FeatureFrame(keys=keys, labels=np.array(labels), matrix=np.array(rows))
