import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from throughputlab.schema import CSV_HEADER, Row, SchemaError, read_csv, write_csv


def test_empty_write_produces_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    write_csv(str(path), [])
    assert path.read_text().strip() == ",".join(CSV_HEADER)
    assert read_csv(str(path)) == []


def test_three_rows_four_lines(tmp_path):
    path = tmp_path / "rows.csv"
    rows = [Row(source="predict", structure="mcs", N=n, throughput_ops_s=1.5 * n) for n in (1, 2, 3)]
    write_csv(str(path), rows)
    assert len(path.read_text().strip().splitlines()) == 4


def test_append_is_header_idempotent(tmp_path):
    path = tmp_path / "append.csv"
    write_csv(str(path), [Row(source="sim", structure="treiber", N=1, throughput_ops_s=0.5)])
    write_csv(str(path), [Row(source="sim", structure="treiber", N=2, throughput_ops_s=0.25)])
    lines = path.read_text().strip().splitlines()
    assert len(lines) == 3
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(read_csv(str(path))) == 2


def test_rejects_foreign_header(tmp_path):
    path = tmp_path / "foreign.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(SchemaError, match="header"):
        read_csv(str(path))
    with pytest.raises(SchemaError, match="header"):
        write_csv(str(path), [])


def test_error_names_bad_row(tmp_path):
    path = tmp_path / "bad.csv"
    good = Row(source="bench", structure="skiplist", N=4, k=32, throughput_ops_s=10.0)
    write_csv(str(path), [good])
    with open(path, "a") as fh:
        fh.write("bench,skiplist,not_an_int,,,,,,,,,,,,,,10.0,0,\n")
    with pytest.raises(SchemaError, match="row 3"):
        read_csv(str(path))


def test_missing_file_error_names_path(tmp_path):
    with pytest.raises(SchemaError, match="nope.csv"):
        read_csv(str(tmp_path / "nope.csv"))


finite_floats = st.floats(min_value=1e-9, max_value=1e9, allow_nan=False)


@given(
    st.lists(
        st.builds(
            Row,
            source=st.sampled_from(["bench", "sim", "predict"]),
            structure=st.sampled_from(["mcs", "treiber", "skiplist"]),
            N=st.integers(1, 64),
            C=st.one_of(st.none(), st.integers(0, 10_000)),
            P=st.one_of(st.none(), st.integers(0, 10_000)),
            prefill=st.one_of(st.none(), st.floats(0, 1, allow_nan=False)),
            alpha=st.one_of(st.none(), finite_floats),
            duration_s=st.one_of(st.none(), finite_floats),
            throughput_ops_s=finite_floats,
            host_tag=st.sampled_from(["", "xeon", "box-1"]),
        ),
        max_size=20,
    )
)
@settings(max_examples=50, deadline=None)
def test_round_trip_preserves_six_significant_digits(tmp_path_factory, rows):
    path = tmp_path_factory.mktemp("csv") / "roundtrip.csv"
    write_csv(str(path), rows)
    back = read_csv(str(path))
    assert len(back) == len(rows)
    for orig, parsed in zip(rows, back):
        for name in CSV_HEADER:
            a, b = getattr(orig, name), getattr(parsed, name)
            if isinstance(a, float) and a is not None:
                assert b == pytest.approx(a, rel=1e-6)
            else:
                assert a == b
