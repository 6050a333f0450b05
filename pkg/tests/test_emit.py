import json
import os
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given, strategies as st

from drivenxy.emit import ResultTable, emit_results, read_csv, render_svg

SVG = "{http://www.w3.org/2000/svg}"


def table(values, name="t", series=(("x", "y", "curve"),)):
    values = np.asarray(values, float)
    return ResultTable(name, {"x": np.arange(len(values), dtype=float), "y": values},
                       {"network": {"gamma": 5.0, "n_sites": 6}}, series, "x", "y")


def test_single_row_csv_has_two_lines(tmp_path):
    paths = emit_results(table([0.5]), ("csv",), tmp_path)
    with open(paths[0]) as fh:
        assert len(fh.read().splitlines()) == 2


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=20))
def test_csv_round_trip_is_exact(tmp_path_factory, values):
    out = tmp_path_factory.mktemp("csv")
    emit_results(table(values), ("csv",), out)
    back = read_csv(os.path.join(out, "t.csv"))
    assert np.array_equal(back["y"], np.asarray(values, float))


def test_svg_parses_with_one_polyline_per_series():
    t = ResultTable("two", {"x": np.linspace(0, 1, 5), "a": np.ones(5), "b": np.zeros(5)}, {},
                    (("x", "a", "A"), ("x", "b", "B <&>")), "x", "C")
    root = ET.fromstring(render_svg(t))
    assert root.tag == SVG + "svg" and root.get("version") == "1.1"
    lines = root.findall(SVG + "polyline")
    assert len(lines) == 2
    assert all(len(p.get("points").split()) == 5 for p in lines)


def test_manifest_echoes_parameters(tmp_path):
    paths = emit_results(table([0.1, 0.2]), ("csv", "json"), tmp_path)
    doc = json.loads(open(paths[1]).read())
    assert doc["metadata"]["network"] == {"gamma": 5.0, "n_sites": 6}
    assert doc["rows"] == 2 and doc["files"] == ["t.csv", "t.json"]


def test_outputs_are_byte_identical_across_runs(tmp_path):
    a = emit_results(table([0.3, 0.1, 0.7]), out_dir=tmp_path / "a")
    b = emit_results(table([0.3, 0.1, 0.7]), out_dir=tmp_path / "b")
    for pa, pb in zip(a, b):
        assert open(pa, "rb").read() == open(pb, "rb").read()


def test_unwritable_destination_leaves_nothing(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError):
        emit_results(table([1.0]), out_dir=blocker / "sub")
    out = tmp_path / "ro"
    out.mkdir()
    (out / "t.svg").mkdir()  # a directory where the last file should go
    with pytest.raises(OSError):
        emit_results(table([1.0]), out_dir=out)
    assert sorted(os.listdir(out)) == ["t.svg"]


def test_refuses_empty_and_unknown():
    with pytest.raises(ValueError, match="empty"):
        emit_results(table([]))
    with pytest.raises(ValueError, match="unknown"):
        emit_results(table([1.0]), ("png",))
    with pytest.raises(ValueError):
        ResultTable("bad", {"x": [1, 2], "y": [1]})
