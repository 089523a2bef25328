"""Synthetic two-class scanpath corpora in the fixation CSV schema.

Each trial simulates reading a multiline stimulus: fixations sweep left to
right along each line with lognormal inter-fixation intervals, jump back to
the line start at line breaks, and occasionally regress backwards within a
line. The two classes differ in how often those regressions occur (and,
optionally, in fixation counts and interval spread), which is exactly the
structure the time-aware filtrations are meant to pick up.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ClassParams:
    """Generative knobs of one class of readers."""

    regression_rate: float
    lines_per_trial: int = 4
    fixations_per_line: float = 9.0
    isi_mean_ms: float = 220.0
    isi_log_sigma: float = 0.35
    line_span_px: tuple[float, float] = (100.0, 980.0)
    first_line_y_px: float = 140.0
    line_height_px: float = 55.0
    y_jitter_px: float = 4.0
    regression_px: tuple[float, float] = (120.0, 320.0)

    def __post_init__(self) -> None:
        if not 0.0 <= self.regression_rate <= 1.0:
            raise ValueError("regression_rate must be in [0, 1]")
        if self.lines_per_trial < 1 or self.fixations_per_line < 2:
            raise ValueError("need at least one line and two fixations per line")
        if self.isi_mean_ms <= 0 or self.isi_log_sigma < 0:
            raise ValueError("inter-fixation interval parameters must be positive")
        if self.line_span_px[1] <= self.line_span_px[0]:
            raise ValueError("line_span_px must be increasing")


def generate_synthetic_corpus(
    n_readers: int,
    trials_per_reader: int,
    class_params: tuple[ClassParams, ClassParams],
    seed: int,
) -> str:
    """CSV text with labels; the first half of readers is class 0.

    Byte-identical output for identical arguments.
    """
    if n_readers < 2 or trials_per_reader < 1:
        raise ValueError("need at least 2 readers and 1 trial per reader")
    rng = np.random.default_rng(seed)
    out = io.StringIO()
    out.write("reader_id,trial_id,onset_ms,x_px,y_px,label\n")
    half = n_readers // 2
    for reader_index in range(n_readers):
        label = 0 if reader_index < half else 1
        params = class_params[label]
        # mild reader-level idiosyncrasy so trials of one reader correlate
        isi_scale = rng.uniform(0.85, 1.2)
        pace_scale = rng.uniform(0.9, 1.1)
        for trial_index in range(trials_per_reader):
            rows = _one_trial(params, rng, isi_scale, pace_scale)
            for onset, x, y in rows:
                out.write(
                    f"r{reader_index:03d},t{trial_index:03d},"
                    f"{onset!r},{x!r},{y!r},{label}\n"
                )
    return out.getvalue()


def _one_trial(
    params: ClassParams,
    rng: np.random.Generator,
    isi_scale: float,
    pace_scale: float,
) -> list[tuple[float, float, float]]:
    x_lo, x_hi = params.line_span_px
    mu = math.log(params.isi_mean_ms * isi_scale) - params.isi_log_sigma**2 / 2.0

    def next_interval() -> float:
        return float(rng.lognormal(mu, params.isi_log_sigma)) + 1.0

    rows: list[tuple[float, float, float]] = []
    onset = 0.0
    for line in range(params.lines_per_trial):
        count = max(3, int(rng.poisson(params.fixations_per_line * pace_scale)))
        step = (x_hi - x_lo) / (count - 1)
        y_line = params.first_line_y_px + line * params.line_height_px
        x = x_lo
        for i in range(count):
            y = y_line + float(rng.uniform(-params.y_jitter_px, params.y_jitter_px))
            rows.append((onset, float(x), y))
            onset += next_interval()
            if i < count - 1:
                if i >= 1 and rng.random() < params.regression_rate:
                    back = max(x_lo, x - float(rng.uniform(*params.regression_px)))
                    y_back = y_line + float(
                        rng.uniform(-params.y_jitter_px, params.y_jitter_px)
                    )
                    rows.append((onset, back, y_back))
                    onset += next_interval()
                x += step * float(rng.uniform(0.75, 1.25))
    return rows
