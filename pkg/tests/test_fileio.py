import csv
import io
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from almostorth.bounds import OperatorFamily, full_report
from almostorth.config import Tolerances
from almostorth.fileio import (
    FamilyFileError,
    dumps_family,
    dumps_report,
    family_to_dict,
    loads_family,
    read_family,
    report_to_flat,
    write_family,
)
from almostorth.lab import random_family, scalar_family

finite = st.floats(allow_nan=False, allow_infinity=False)


def good_dict():
    return family_to_dict(scalar_family(2, 2))


class TestFamilyRoundTrip:
    def test_file_round_trip_bitwise(self, tmp_path):
        f = random_family(3, 4, 123, "general")
        write_family(f, tmp_path / "f.json")
        g = read_family(tmp_path / "f.json")
        assert g.label == f.label
        for x, y in zip(f, g):
            assert x.tobytes() == y.tobytes()

    @given(st.lists(st.tuples(finite, finite), min_size=4, max_size=4))
    @settings(max_examples=200)
    def test_any_double_round_trips(self, pairs):
        m = np.array([complex(a, b) for a, b in pairs]).reshape(2, 2)
        g = loads_family(dumps_family(OperatorFamily((m,), "x")))
        assert g[0].tobytes() == m.tobytes()

    def test_layout(self):
        text = dumps_family(scalar_family(2, 1))
        assert '"schema_version": 1' in text
        assert "[[0.5, 0.0]]" in text
        assert json.loads(text)["operators"] == [[[1.0, 0.0]], [[0.5, 0.0]]]

    def test_unknown_keys_ignored(self):
        d = good_dict() | {"vectors": {"x": []}}
        assert loads_family(json.dumps(d)).n == 2


class TestFamilyDiagnostics:
    @pytest.mark.parametrize("field", ["schema_version", "dim", "count", "label", "operators"])
    def test_missing_field_named(self, field):
        d = good_dict()
        del d[field]
        with pytest.raises(FamilyFileError, match=field):
            loads_family(json.dumps(d))

    def test_truncated_text_reports_position(self):
        text = dumps_family(scalar_family(2, 2))
        with pytest.raises(FamilyFileError, match=r"line \d+ column \d+"):
            loads_family(text[: len(text) // 2])

    def test_count_mismatch(self):
        d = good_dict() | {"count": 3}
        with pytest.raises(FamilyFileError, match="count=3"):
            loads_family(json.dumps(d))

    def test_wrong_entry_count(self):
        d = good_dict()
        d["operators"][1] = d["operators"][1][:3]
        with pytest.raises(FamilyFileError, match=r"operators\[1\]: expected 4 entries"):
            loads_family(json.dumps(d))

    @pytest.mark.parametrize("bad", [float("nan"), float("inf"), "1.0", None, True])
    def test_bad_number(self, bad):
        d = good_dict()
        d["operators"][0][2] = [bad, 0.0]
        with pytest.raises(FamilyFileError, match=r"operators\[0\]\[2\]\[0\]"):
            loads_family(json.dumps(d))

    def test_bad_pair(self):
        d = good_dict()
        d["operators"][0][0] = [1.0]
        with pytest.raises(FamilyFileError, match="pair"):
            loads_family(json.dumps(d))

    def test_wrong_schema(self):
        with pytest.raises(FamilyFileError, match="schema_version"):
            loads_family(json.dumps(good_dict() | {"schema_version": 2}))

    @pytest.mark.parametrize("key,value", [("dim", 0), ("count", 0), ("dim", 1.5), ("label", 3)])
    def test_bad_header(self, key, value):
        with pytest.raises(FamilyFileError, match=key):
            loads_family(json.dumps(good_dict() | {key: value}))


class TestReport:
    def test_flat_keys(self):
        rep = full_report(scalar_family(4))
        flat = report_to_flat(rep, label="s4", seed=9, tol=Tolerances())
        assert flat["label"] == "s4" and flat["seed"] == 9
        assert flat["chain_ok"] is True
        assert flat["cotlar_stein"] == 6.25
        assert "tool_version" in flat and "tol.chain" in flat
        assert flat["a_matrix[0][1]"] == pytest.approx(0.5)
        assert all(not isinstance(v, (dict, list)) for v in flat.values())

    def test_json_and_csv_agree(self):
        rep = full_report(random_family(3, 2, 4))
        flat = report_to_flat(rep)
        from_json = json.loads(dumps_report(flat, "json"))
        rows = list(csv.reader(io.StringIO(dumps_report(flat, "csv"))))
        assert rows[0] == ["key", "value"]
        from_csv = dict(rows[1:])
        assert list(from_csv) == list(from_json)
        for k, v in from_json.items():
            if isinstance(v, float):
                assert float(from_csv[k]) == v
        assert from_csv["chain_ok"] == "true"

    def test_csv_line_endings(self):
        text = dumps_report(report_to_flat(full_report(scalar_family(2))), "csv")
        assert "\r" not in text and text.endswith("\n")
