import io

import pytest
from hypothesis import given, strategies as st

from cascade_dim.boxdim import CountSeries, DimEstimate
from cascade_dim.csvio import (
    RunManifest,
    data_lines,
    format_value,
    read_count_series_csv,
    read_csv,
    read_dim_estimate_csv,
    render_csv,
    write_count_series_csv,
    write_dim_estimate_csv,
)


def test_manifest_is_comments():
    m = RunManifest("cascade-dim x", "twopoint:xi=0.5", (1, 2), 10, timestamp="T")
    lines = m.header_lines()
    assert all(ln.startswith("# ") for ln in lines)
    assert "# seeds: 1 2" in lines and "# depth: 10" in lines


def test_data_rows_ignore_timestamp():
    a = render_csv(["a"], [[1.5]], RunManifest("c", timestamp="t1"))
    b = render_csv(["a"], [[1.5]], RunManifest("c", timestamp="t2"))
    assert a != b and data_lines(a) == data_lines(b)


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_round_trip(x):
    assert float(format_value(x)) == x


def test_float_has_enough_digits():
    assert len(format_value(1 / 3).replace("0.", "")) >= 12
    assert format_value(True) == "1" and format_value(False) == "0"
    assert format_value(float("nan")) == "nan"


def test_count_series_round_trip(tmp_path):
    s = CountSeries(((3, 5), (1, 2), (2, 4)))
    path = tmp_path / "s.csv"
    write_count_series_csv(s, path, RunManifest("c"))
    assert read_count_series_csv(path) == s
    assert data_lines(path.read_text())[0] == "n,count"


def test_dim_estimate_round_trip():
    est = DimEstimate(0.3541, 0.01, (5, 20), CountSeries(((1, 1),)))
    buf = io.StringIO()
    write_dim_estimate_csv(est, buf)
    buf.seek(0)
    assert read_dim_estimate_csv(buf) == {"slope": 0.3541, "stderr": 0.01, "n_lo": 5, "n_hi": 20}


def test_wrong_header():
    with pytest.raises(ValueError):
        read_count_series_csv(io.StringIO("a,b\n1,2\n"))


def test_read_csv_skips_comments():
    header, rows = read_csv(io.StringIO("# x\np,dim\n1,0.5\n"))
    assert header == ["p", "dim"] and rows == [{"p": "1", "dim": "0.5"}]
