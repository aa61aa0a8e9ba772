import csv
import io
import json
import math

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from halfspace.report import format_float, render, to_csv, to_json


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_round_trip(x):
    assert float(format_float(x)) == x


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=5))
def test_csv_and_json_carry_the_same_values(xs):
    records = [{"i": i, "x": x, "ok": x > 0} for i, x in enumerate(xs)]
    back_csv = list(csv.DictReader(io.StringIO(to_csv(records))))
    back_json = json.loads(to_json(records))
    assert [float(r["x"]) for r in back_csv] == xs
    assert [r["x"] for r in back_json] == xs
    assert [r["ok"] for r in back_json] == [x > 0 for x in xs]
    assert list(back_csv[0]) == list(back_json[0]) == ["i", "x", "ok"]


def test_special_values():
    rec = [{"a": None, "b": math.nan, "c": np.bool_(True), "d": np.int64(3), "e": "x,y"}]
    assert to_csv(rec).splitlines() == ["a,b,c,d,e", ',nan,true,3,"x,y"']
    assert json.loads(to_json(rec)) == [{"a": None, "b": None, "c": True, "d": 3, "e": "x,y"}]


def test_explicit_columns_and_empty():
    assert to_csv([{"b": 1}], columns=["a", "b"]) == "a,b\n,1\n"
    assert render([], "json") == "[]\n"
    assert render([], "csv", columns=["a"]) == "a\n"
