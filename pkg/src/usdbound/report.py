"""Serialization of corpus results as text, JSON or CSV."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict

from .corpus import CaseResult

FORMATS = ("text", "json", "csv")

CSV_COLUMNS = (
    "name",
    "bound",
    "expected_bound",
    "p_opt",
    "expected_p_opt",
    "bound_gap",
    "solution_class",
    "expected_class",
    "povm_valid",
    "eta_min_spread",
    "vidal_residual",
    "passed",
    "failures",
    "provenance",
)


def _row(r: CaseResult) -> dict:
    d = asdict(r)
    d["passed"] = r.passed
    return d


def _fmt4(x) -> str:
    # round first so tiny negatives do not print as -0.0000
    return "-" if x is None else f"{round(x, 4) + 0.0:.4f}"


def _text(results: list[CaseResult]) -> str:
    header = ("case", "bound", "expected", "P_opt", "expected", "gap", "class", "status")
    rows = [
        (
            r.name,
            _fmt4(r.bound),
            _fmt4(r.expected_bound),
            _fmt4(r.p_opt),
            _fmt4(r.expected_p_opt),
            _fmt4(r.bound_gap),
            r.solution_class,
            "PASS" if r.passed else "FAIL",
        )
        for r in results
    ]
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    lines = ["  ".join(str(x).ljust(w) for x, w in zip(line, widths)).rstrip() for line in (header, *rows)]
    lines.insert(1, "  ".join("-" * w for w in widths))
    for r in results:
        for msg in r.failures:
            lines.append(f"  {r.name}: {msg}")
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results)} cases, {failed} failed")
    return "\n".join(lines) + "\n"


def emit_report(results: list[CaseResult], fmt: str = "text") -> str:
    """Render results; numbers keep full precision except in text mode."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown report format {fmt!r}; choose from {', '.join(FORMATS)}")
    results = sorted(results, key=lambda r: r.name)
    if fmt == "text":
        return _text(results)
    if fmt == "json":
        doc = {
            "cases": [_row(r) for r in results],
            "passed": all(r.passed for r in results),
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in results:
        row = _row(r)
        row["failures"] = "; ".join(r.failures)
        writer.writerow({k: ("" if row[k] is None else row[k]) for k in CSV_COLUMNS})
    return buf.getvalue()
