"""
Published reference tables and report comparison.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Any

import yaml

from dgsmkit.core.bounds import BoundsReport

logger = logging.getLogger(__name__)

TABLES_PATH = Path(__file__).parent / "data" / "reference_tables.yml"


@dataclass
class TableEntry:
    """One table cell against the report value."""
    quantity: str
    variable: int
    expected: float
    actual: float | None
    tolerance: float
    relative: bool

    @property
    def deviation(self) -> float | None:
        if self.actual is None:
            return None
        return abs(self.actual - self.expected)

    @property
    def passed(self) -> bool:
        if self.actual is None:
            return False
        return self.deviation <= self.tolerance

    def to_dict(self) -> dict[str, Any]:
        return {
            "quantity": self.quantity,
            "variable": self.variable,
            "expected": self.expected,
            "actual": self.actual,
            "deviation": self.deviation,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


@lru_cache(maxsize=None)
def load_reference_tables(path: Path = TABLES_PATH) -> dict[str, dict[str, Any]]:
    with open(path, encoding="utf-8") as f:
        return yaml.safe_load(f) or {}


def _tolerance(spec: dict[str, Any], quantity: str, expected: float) -> tuple[float, bool]:
    if spec.get("relative"):
        if abs(expected) < spec.get("small_below", 0.0):
            return float(spec["small_abs"]), False
        return float(spec["value"]) * abs(expected), True
    return float(spec[quantity]), False


def compare_with_reference(report: BoundsReport, table: str) -> dict[str, Any]:
    """
    Cell-by-cell comparison of a report with a bundled table.
    Returns {"table", "note", "entries", "passed", "failures"}; failures are logged.
    """
    tables = load_reference_tables()
    if table not in tables:
        raise KeyError(f"unknown reference table '{table}' (known: {', '.join(tables)})")
    spec = tables[table]
    entries: list[TableEntry] = []
    for quantity, values in spec["values"].items():
        for i, expected in enumerate(values, start=1):
            tol, relative = _tolerance(spec["tolerance"], quantity, float(expected))
            actual = report.value(quantity, i)
            entries.append(TableEntry(quantity, i, float(expected), actual, tol, relative))

    failures = [e for e in entries if not e.passed]
    for e in failures:
        logger.warning(
            "%s: %s of x%d is %s, table says %g (tolerance %g). %s",
            table, e.quantity, e.variable, e.actual, e.expected, e.tolerance, spec.get("note", ""),
        )
    return {
        "table": table,
        "note": spec.get("note", ""),
        "entries": [e.to_dict() for e in entries],
        "passed": not failures,
        "failures": len(failures),
    }
