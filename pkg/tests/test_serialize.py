import json
import math

import numpy as np

from cgl_blowup.serialize import fmt_float, to_json_text, write_csv


def test_floats_roundtrip_exactly():
    values = [1 / 3, math.pi, 1e-300, 6.283185307179586, -0.0, 2.0 ** -52]
    for v in values:
        assert float(fmt_float(v)) == v or (v == 0 and fmt_float(v) == "0")


def test_seventeen_significant_digits():
    assert fmt_float(1 / 3) == "0.33333333333333331"
    assert fmt_float(2.0) == "2"


def test_non_finite_maps_to_null():
    assert fmt_float(math.inf) == "null"
    assert fmt_float(math.nan) == "null"
    doc = json.loads(to_json_text({"a": math.inf, "b": [1.0, math.nan]}))
    assert doc["a"] is None
    assert doc["b"][1] is None


def test_json_text_is_valid_and_ordered():
    obj = {"z": 1, "a": [True, None, "x\"y\n"], "n": np.float64(0.5),
           "arr": np.array([1.0, 2.0]), "c": 1 + 2j}
    doc = json.loads(to_json_text(obj))
    assert list(doc.keys()) == ["z", "a", "n", "arr", "c"]
    assert doc["a"][2] == 'x"y\n'
    assert doc["c"] == [1.0, 2.0]


def test_csv_writer(tmp_path):
    path = tmp_path / "t.csv"
    write_csv(path, "a,b", [[1.0, 2.0], [0.1, math.inf]])
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "a,b"
    assert lines[1] == "1,0.10000000000000001"
    assert lines[2] == "2,null"
