import json
import math

import numpy as np
import pytest
from pydantic import ValidationError

from maskcorr.components.report_view import format_amplitudes, render_reports, reports_table
from maskcorr.services.reports import (
    VerificationReport,
    load_reports,
    reports_from_json,
    reports_to_json,
    require_trials,
    save_reports,
    suite_passed,
)
from maskcorr.utils.errors import ScenarioError


@pytest.fixture
def reports():
    return [
        VerificationReport.build("masking", 5, 11, 1e-10, [1e-16, 3e-17], [{"trial": 1, "X": 1e-16}]),
        VerificationReport.build("dispatch", 5, 12, 1e-10, [2e-9], diagnostics={"xy_min_fidelity": 0.5}),
        VerificationReport.failed("nosignal", 5, 13, 1e-10, "RuntimeError: boom"),
    ]


def test_build_takes_worst_deviation(reports):
    assert reports[0].max_deviation == 1e-16
    assert reports[0].passed
    assert not reports[1].passed


def test_pass_flag_must_match():
    with pytest.raises(ValidationError):
        VerificationReport(scenario="x", trials=1, seed=0, tolerance=1e-10, max_deviation=1.0, passed=True)


def test_alias_accepted():
    report = VerificationReport.model_validate(
        {"scenario": "x", "trials": 1, "seed": 0, "tolerance": 1.0, "max_deviation": 0.5, "pass": True}
    )
    assert report.passed


def test_suite_passed(reports):
    assert not suite_passed(reports)
    assert suite_passed(reports[:1])
    assert not suite_passed([])


def test_summary_json(reports):
    data = json.loads(reports_to_json(reports))
    assert list(data[0]) == ["scenario", "trials", "seed", "tolerance", "max_deviation", "pass"]
    assert data[2]["error"] == "RuntimeError: boom"
    assert data[2]["max_deviation"] is None
    assert "Infinity" not in reports_to_json(reports, include_details=True)


def test_round_trip_with_details(reports, tmp_path):
    path = save_reports(reports, tmp_path / "reports.json", include_details=True)
    loaded = load_reports(path)
    assert [r.model_dump() for r in loaded] == [r.model_dump() for r in reports]


def test_json_must_be_array():
    with pytest.raises(ValueError):
        reports_from_json('{"scenario": "x"}')


def test_require_trials():
    require_trials("masking", 2, 2)
    with pytest.raises(ScenarioError, match="at least 2"):
        require_trials("masking", 1, 2)


def test_table_and_text(reports):
    table = reports_table(reports)
    assert list(table["pass"]) == ["PASS", "FAIL", "FAIL"]

    text = render_reports(reports)
    assert "FAIL (2/3): dispatch, nosignal" in text
    assert "nosignal: error: RuntimeError: boom" in text
    assert "dispatch: xy_min_fidelity = 0.5" in text
    assert "trial=1" not in text
    assert "masking: trial=1" in render_reports(reports, show_details=True)


def test_text_all_pass(reports):
    assert render_reports(reports[:1]).endswith("ALL PASS (1/1)\n")
    assert render_reports([]) == "No scenarios were run.\n"


def test_format_amplitudes_skips_zeros():
    text = format_amplitudes(np.array([0, 1j, 0, 0]), 2)
    assert text.strip() == "|01>  +0.000000 +1.000000i"


def test_unfinished_scenario_round_trips_through_null(reports):
    loaded = reports_from_json(reports_to_json(reports))
    assert math.isinf(loaded[2].max_deviation)
    assert not loaded[2].passed
    assert loaded[2].error == "RuntimeError: boom"
