import numpy as np
import pytest

from scanpath_tda.timeseries import Fixation, FixationSequence, TimeSeries

# The worked six-fixation example trial used throughout the golden checks.
TABLE1_ROWS = [
    (0.0, 963.1, 533.0),
    (244.0, 210.7, 95.4),
    (366.0, 100.0, 130.8),
    (726.0, 457.2, 124.3),
    (984.0, 569.6, 120.7),
    (1415.0, 281.6, 136.6),
]


@pytest.fixture
def table1_sequence() -> FixationSequence:
    return FixationSequence(
        reader_id="r01",
        trial_id="t01",
        fixations=tuple(Fixation(*row) for row in TABLE1_ROWS),
        label=0,
    )


@pytest.fixture
def table1_csv() -> str:
    lines = ["reader_id,trial_id,onset_ms,x_px,y_px,label"]
    for onset, x, y in TABLE1_ROWS:
        lines.append(f"r01,t01,{onset},{x},{y},0")
    return "\n".join(lines) + "\n"


def random_series(rng: np.random.Generator, length: int) -> TimeSeries:
    """A generic random series on [0, 1] x [0, 1] with distinct values."""
    gaps = rng.uniform(0.05, 1.0, size=length)
    t = np.concatenate(([0.0], np.cumsum(gaps)))[:length]
    if length > 1:
        t = t / t[-1]
    x = rng.uniform(0.0, 1.0, size=length)
    return TimeSeries(t, x)
