import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scanpath_tda.errors import (
    DegenerateRangeError,
    ParseError,
    SchemaError,
    ValidationError,
)
from scanpath_tda.timeseries import (
    Fixation,
    FixationSequence,
    TimeSeries,
    filter_trials,
    minmax_scale,
    parse_fixation_csv,
    split,
    write_fixation_csv,
)

from conftest import TABLE1_ROWS


class TestParse:
    def test_table1_round(self, table1_csv):
        seqs = parse_fixation_csv(table1_csv)
        assert len(seqs) == 1
        seq = seqs[0]
        assert len(seq) == 6
        assert seq.key == ("r01", "t01")
        assert seq.label == 0
        assert [f.onset_ms for f in seq.fixations] == [0, 244, 366, 726, 984, 1415]

    def test_accepts_bytes(self, table1_csv):
        assert len(parse_fixation_csv(table1_csv.encode())) == 1

    def test_header_only(self):
        assert parse_fixation_csv("reader_id,trial_id,onset_ms,x_px,y_px\n") == []

    def test_missing_column(self):
        with pytest.raises(SchemaError, match="x_px"):
            parse_fixation_csv("reader_id,trial_id,onset_ms,y_px\n")

    def test_duplicate_onset(self):
        text = (
            "reader_id,trial_id,onset_ms,x_px,y_px\n"
            "r,t,244,1.0,2.0\n"
            "r,t,244,3.0,4.0\n"
        )
        with pytest.raises(ValidationError) as err:
            parse_fixation_csv(text)
        assert "244" in str(err.value) and "'r'" in str(err.value) and "'t'" in str(err.value)

    def test_non_numeric_cell_names_row(self):
        text = "reader_id,trial_id,onset_ms,x_px,y_px\nr,t,0,1.0,2.0\nr,t,5,oops,2.0\n"
        with pytest.raises(ParseError, match="row 3"):
            parse_fixation_csv(text)

    def test_unsorted_rows_are_sorted_by_onset(self):
        text = "reader_id,trial_id,onset_ms,x_px,y_px\nr,t,10,1.0,2.0\nr,t,5,3.0,4.0\n"
        (seq,) = parse_fixation_csv(text)
        assert [f.onset_ms for f in seq.fixations] == [5.0, 10.0]

    def test_conflicting_labels(self):
        text = "reader_id,trial_id,onset_ms,x_px,y_px,label\nr,t,0,1.0,2.0,0\nr,t,5,3.0,4.0,1\n"
        with pytest.raises(ValidationError, match="conflicting"):
            parse_fixation_csv(text)

    def test_custom_schema(self):
        text = "subj,page,time,gx,gy\nr,t,0,1.0,2.0\n"
        seqs = parse_fixation_csv(
            text,
            schema={
                "reader_id": "subj",
                "trial_id": "page",
                "onset_ms": "time",
                "x_px": "gx",
                "y_px": "gy",
            },
        )
        assert seqs[0].fixations[0] == Fixation(0.0, 1.0, 2.0)

    def test_round_trip_identity(self, table1_sequence):
        extra = FixationSequence("z9", "t2", (Fixation(1.5, 2.25, 3.125),))
        original = [table1_sequence, extra]
        assert parse_fixation_csv(write_fixation_csv(original)) == original


class TestSplit:
    def test_table1_x_series(self, table1_sequence):
        xs, _ = split(table1_sequence)
        assert xs.t.tolist() == [r[0] for r in TABLE1_ROWS]
        assert xs.x.tolist() == [963.1, 210.7, 100.0, 457.2, 569.6, 281.6]

    def test_table1_y_series(self, table1_sequence):
        _, ys = split(table1_sequence)
        assert ys.x.tolist() == [533.0, 95.4, 130.8, 124.3, 120.7, 136.6]

    def test_single_fixation(self):
        seq = FixationSequence("r", "t", (Fixation(3.0, 7.0, 9.0),))
        xs, ys = split(seq)
        assert len(xs) == len(ys) == 1

    def test_lossless(self, table1_sequence):
        xs, ys = split(table1_sequence)
        rebuilt = list(zip(xs.t, xs.x, ys.x))
        assert rebuilt == TABLE1_ROWS


class TestMinmaxScale:
    def test_extremes_map_to_unit(self, table1_sequence):
        xs, _ = split(table1_sequence)
        scaled = minmax_scale(xs)
        assert scaled.x.max() == 1.0 and scaled.x.min() == 0.0
        assert scaled.x[0] == 1.0  # 963.1 is the max
        assert scaled.x[2] == 0.0  # 100.0 is the min

    def test_table1_derived_value(self, table1_sequence):
        xs, _ = split(table1_sequence)
        scaled = minmax_scale(xs)
        assert scaled.x[1] == pytest.approx(0.12825860271115744, abs=1e-15)

    def test_constant_series_raises(self):
        ts = TimeSeries([0.0, 1.0, 2.0], [5.0, 5.0, 5.0])
        with pytest.raises(DegenerateRangeError):
            minmax_scale(ts)

    def test_time_axis_scaled_and_flag(self, table1_sequence):
        xs, _ = split(table1_sequence)
        scaled = minmax_scale(xs, scale_time=True)
        assert scaled.t[0] == 0.0 and scaled.t[-1] == 1.0
        raw = minmax_scale(xs, scale_time=False)
        assert raw.t.tolist() == xs.t.tolist()

    @given(
        st.lists(
            st.integers(min_value=-(10**9), max_value=10**9),
            min_size=2,
            max_size=30,
            unique=True,
        )
    )
    @settings(max_examples=100)
    def test_idempotent_monotone_and_argext(self, raw):
        # grid-valued inputs keep gaps far above the output ulp
        values = [v / 1000.0 for v in raw]
        ts = TimeSeries(np.arange(len(values), dtype=float), values)
        once = minmax_scale(ts)
        twice = minmax_scale(once)
        assert np.abs(twice.x - once.x).max() <= 1e-12
        order = np.argsort(ts.x)
        assert (np.diff(once.x[order]) > 0).all()
        assert np.argmin(once.x) == np.argmin(ts.x)
        assert np.argmax(once.x) == np.argmax(ts.x)


class TestFilterTrials:
    def test_threshold_five(self, table1_sequence):
        short = FixationSequence(
            "r", "s", tuple(Fixation(float(i), float(i), 0.0) for i in range(4))
        )
        assert filter_trials([table1_sequence, short], 5) == [table1_sequence]

    def test_threshold_one_is_noop(self, table1_sequence):
        assert filter_trials([table1_sequence], 1) == [table1_sequence]

    def test_empty(self):
        assert filter_trials([], 5) == []

    def test_invalid_threshold(self):
        with pytest.raises(ValueError):
            filter_trials([], 0)


class TestInvariants:
    def test_strictly_increasing_onsets_enforced(self):
        with pytest.raises(ValidationError):
            FixationSequence("r", "t", (Fixation(1.0, 0.0, 0.0), Fixation(1.0, 1.0, 1.0)))

    def test_non_finite_rejected(self):
        with pytest.raises(ValidationError):
            Fixation(0.0, float("nan"), 0.0)
        with pytest.raises(ValidationError):
            TimeSeries([0.0, 1.0], [0.0, float("inf")])

    def test_time_series_needs_increasing_times(self):
        with pytest.raises(ValidationError):
            TimeSeries([0.0, 0.0], [1.0, 2.0])
