"""
Report View Component

Terminal rendering of verification reports and small matrices.
"""

from typing import Sequence

import numpy as np
import pandas as pd

from ..services.reports import VerificationReport, suite_passed


def reports_table(reports: Sequence[VerificationReport]) -> pd.DataFrame:
    """One row per scenario with the summary fields."""
    rows = [
        {
            "scenario": r.scenario,
            "trials": r.trials,
            "seed": r.seed,
            "tolerance": r.tolerance,
            "max_deviation": r.max_deviation,
            "pass": "PASS" if r.passed else "FAIL",
        }
        for r in reports
    ]
    return pd.DataFrame(rows, columns=["scenario", "trials", "seed", "tolerance", "max_deviation", "pass"])


def render_reports(reports: Sequence[VerificationReport], show_details: bool = False) -> str:
    """Render reports as an aligned table followed by a summary line."""
    if not reports:
        return "No scenarios were run.\n"

    df = reports_table(reports)
    lines = [
        df.to_string(
            index=False,
            formatters={
                "tolerance": "{:.1e}".format,
                "max_deviation": "{:.3e}".format,
            },
        )
    ]

    for report in reports:
        if report.error:
            lines.append(f"  {report.scenario}: error: {report.error}")
        for key, value in report.diagnostics.items():
            lines.append(f"  {report.scenario}: {key} = {value:.6g}")
        if show_details:
            for record in report.details:
                fields = ", ".join(f"{k}={_format_value(v)}" for k, v in record.items())
                lines.append(f"    {report.scenario}: {fields}")

    failed = [r.scenario for r in reports if not r.passed]
    if suite_passed(reports):
        lines.append(f"ALL PASS ({len(reports)}/{len(reports)})")
    else:
        lines.append(f"FAIL ({len(failed)}/{len(reports)}): {', '.join(failed)}")
    return "\n".join(lines) + "\n"


def _format_value(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def format_matrix(matrix: np.ndarray, precision: int = 6) -> str:
    """Readable complex matrix with tiny entries shown as zero."""
    return np.array2string(
        np.asarray(matrix),
        precision=precision,
        suppress_small=True,
        max_line_width=120,
    )


def format_amplitudes(amplitudes: np.ndarray, num_qubits: int, eps: float = 1e-12) -> str:
    """List nonzero amplitudes as |bits>: value."""
    lines = []
    for index, value in enumerate(np.asarray(amplitudes).reshape(-1)):
        if abs(value) > eps:
            bits = format(index, f"0{num_qubits}b")
            lines.append(f"  |{bits}>  {value.real:+.6f} {value.imag:+.6f}i")
    return "\n".join(lines)
