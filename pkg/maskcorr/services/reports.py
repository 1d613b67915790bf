"""
Verification Reports

Outcome records of scenario runs and their JSON form.
"""

import json
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..utils.errors import ScenarioError
from ..utils.serialization import PathLike, write_text

# Fields written by default; details and diagnostics are opt-in.
SUMMARY_FIELDS = ("scenario", "trials", "seed", "tolerance", "max_deviation", "pass")


class VerificationReport(BaseModel):
    """Result of one scenario: pass iff max_deviation <= tolerance."""
    model_config = ConfigDict(populate_by_name=True, frozen=True)

    scenario: str
    trials: int
    seed: int
    tolerance: float
    max_deviation: float
    passed: bool = Field(alias="pass")
    details: List[Dict[str, Any]] = Field(default_factory=list)
    diagnostics: Dict[str, float] = Field(default_factory=dict)
    error: Optional[str] = None

    @model_validator(mode="after")
    def _pass_matches_deviation(self) -> "VerificationReport":
        if self.passed != (self.max_deviation <= self.tolerance):
            raise ValueError("pass flag must equal max_deviation <= tolerance")
        return self

    @classmethod
    def build(
        cls,
        scenario: str,
        trials: int,
        seed: int,
        tolerance: float,
        deviations: Sequence[float],
        details: Optional[List[Dict[str, Any]]] = None,
        diagnostics: Optional[Dict[str, float]] = None,
    ) -> "VerificationReport":
        """Report from per-trial deviations; the worst one decides."""
        worst = max((float(d) for d in deviations), default=0.0)
        return cls(
            scenario=scenario,
            trials=trials,
            seed=seed,
            tolerance=tolerance,
            max_deviation=worst,
            passed=worst <= tolerance,
            details=details or [],
            diagnostics=diagnostics or {},
        )

    @classmethod
    def failed(cls, scenario: str, trials: int, seed: int, tolerance: float, error: str) -> "VerificationReport":
        """Report for a scenario that raised instead of finishing."""
        return cls(
            scenario=scenario,
            trials=trials,
            seed=seed,
            tolerance=tolerance,
            max_deviation=math.inf,
            passed=False,
            error=error,
        )

    def to_dict(self, include_details: bool = False) -> Dict[str, Any]:
        """
        Convert to dictionary for serialization.

        A scenario that never finished has an infinite deviation, written as None.
        """
        data = self.model_dump(by_alias=True)
        if not math.isfinite(data["max_deviation"]):
            data["max_deviation"] = None
        if include_details:
            return data
        summary = {key: data[key] for key in SUMMARY_FIELDS}
        if self.error is not None:
            summary["error"] = self.error
        return summary

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "VerificationReport":
        if data.get("max_deviation", 0.0) is None:
            data = {**data, "max_deviation": math.inf}
        return cls.model_validate(data)


def suite_passed(reports: Sequence[VerificationReport]) -> bool:
    """Aggregate flag: every scenario passed (an empty suite does not pass)."""
    return bool(reports) and all(r.passed for r in reports)


def reports_to_json(reports: Sequence[VerificationReport], include_details: bool = False) -> str:
    """Strict JSON array of reports; key order and float formatting are stable across runs."""
    return json.dumps([r.to_dict(include_details) for r in reports], indent=2, allow_nan=False) + "\n"


def reports_from_json(text: str) -> List[VerificationReport]:
    data = json.loads(text)
    if not isinstance(data, list):
        raise ValueError("Report JSON must be an array")
    return [VerificationReport.from_dict(item) for item in data]


def save_reports(reports: Sequence[VerificationReport], output_path: PathLike,
                 include_details: bool = False) -> Path:
    """Save reports to a JSON file."""
    return write_text(output_path, reports_to_json(reports, include_details))


def load_reports(input_path: PathLike) -> List[VerificationReport]:
    """Load reports from a JSON file."""
    with open(input_path, "r", encoding="utf-8") as f:
        return reports_from_json(f.read())


def require_trials(scenario: str, trials: int, minimum: int) -> None:
    """Raise ScenarioError when a scenario gets fewer trials than it can work with."""
    if trials < minimum:
        raise ScenarioError(f"{scenario} needs at least {minimum} trial(s), got {trials}")
