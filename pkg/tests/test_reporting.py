import json

from lattice_rotor.reporting import RunReport, canonical_json, covering_csv, tau_csv


def _sample_report(**kwargs):
    defaults = dict(
        spec_echo={"mode": "solve", "epsilon": "0.1"},
        mode="solve",
        results=({"t": "100", "achieved": True},),
        summary={"count": 1, "all_achieved": True},
        tool_version="0.1.0",
    )
    defaults.update(kwargs)
    return RunReport(**defaults)


class TestCanonicalJson:
    def test_key_order_is_stable(self):
        a = canonical_json({"b": 1, "a": 2})
        b = canonical_json({"a": 2, "b": 1})
        assert a == b

    def test_trailing_newline(self):
        assert canonical_json({}).endswith("\n")

    def test_no_float_reformatting_of_strings(self):
        text = canonical_json({"x": "0.100000000000000000000000000001"})
        assert "0.100000000000000000000000000001" in text

    def test_round_trips_through_json(self):
        obj = {"nested": {"list": [1, "two", None, True]}}
        assert json.loads(canonical_json(obj)) == obj


class TestRunReport:
    def test_to_json_is_canonical(self):
        r = _sample_report()
        text = r.to_json()
        assert text == canonical_json(r.to_json_dict())

    def test_round_trip(self):
        r = _sample_report(warnings=("precision low",))
        back = RunReport.from_json(r.to_json())
        assert back == r

    def test_wall_clock_omitted_when_absent(self):
        r = _sample_report()
        assert "wall_clock_seconds" not in r.to_json_dict()

    def test_wall_clock_present_when_set(self):
        r = _sample_report(wall_clock_seconds="1.234")
        assert r.to_json_dict()["wall_clock_seconds"] == "1.234"

    def test_identical_reports_serialize_identically(self):
        assert _sample_report().to_json() == _sample_report().to_json()


class TestCsv:
    def test_tau_header_and_rows(self):
        text = tau_csv([("1", "0.25", "0.1"), ("2", "0.2", "0.05")])
        lines = text.splitlines()
        assert lines[0] == "t,upper,certified_lower"
        assert lines[1] == "1,0.25,0.1"
        assert lines[2] == "2,0.2,0.05"
        assert text.endswith("\n")

    def test_covering_header(self):
        text = covering_csv([("0.1", "12.5")])
        assert text.splitlines()[0] == "eps,L"
        assert text.splitlines()[1] == "0.1,12.5"
