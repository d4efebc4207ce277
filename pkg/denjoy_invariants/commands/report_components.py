# denjoy_invariants/commands/report_components.py
import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Mapping

import pandas as pd
import sympy

from .. import REPORT_SCHEMA, __version__
from ..errors import SpecParseError

# =========================================================================
# Plain-data conversion
# =========================================================================
def jsonable(value: Any) -> Any:
    """Exact values become strings; containers become lists and dicts with string keys."""
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (Fraction, sympy.Basic)):
        return str(value)
    if isinstance(value, enum.Enum):
        return value.value
    if hasattr(value, "to_json"):
        return jsonable(value.to_json())
    if isinstance(value, Mapping):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted((jsonable(v) for v in value), key=lambda v: json.dumps(v, sort_keys=True))
    return str(value)


# =========================================================================
# Report
# =========================================================================
@dataclass
class Report:
    command: str
    inputs: Dict[str, Any] = field(default_factory=dict)
    outputs: Dict[str, Any] = field(default_factory=dict)
    certificates: Dict[str, Any] = field(default_factory=dict)
    tables: Dict[str, List[Dict[str, Any]]] = field(default_factory=dict)
    timing_seconds: float = field(default=0.0, compare=False)
    schema: str = REPORT_SCHEMA
    version: str = __version__

    def __post_init__(self):
        self.inputs = jsonable(self.inputs)
        self.outputs = jsonable(self.outputs)
        self.certificates = jsonable(self.certificates)
        self.tables = jsonable(self.tables)

    def to_json(self, timing: bool = True) -> dict:
        doc = {
            "schema": self.schema,
            "version": self.version,
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "certificates": self.certificates,
            "tables": self.tables,
        }
        if timing:
            doc["timing_seconds"] = round(self.timing_seconds, 6)
        return doc

    def dumps(self, timing: bool = True) -> str:
        return json.dumps(self.to_json(timing), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, doc: Mapping[str, Any]) -> "Report":
        if doc.get("schema") != REPORT_SCHEMA:
            raise SpecParseError(f"not a {REPORT_SCHEMA} document (schema {doc.get('schema')!r})")
        return cls(
            command=doc["command"],
            inputs=doc.get("inputs", {}),
            outputs=doc.get("outputs", {}),
            certificates=doc.get("certificates", {}),
            tables=doc.get("tables", {}),
            timing_seconds=float(doc.get("timing_seconds", 0.0)),
            version=doc.get("version", __version__),
        )

    @classmethod
    def loads(cls, text: str) -> "Report":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise SpecParseError(e.msg, e.lineno, e.colno) from None
        return cls.from_json(doc)


# =========================================================================
# Table rendering
# =========================================================================
def _flatten(prefix: str, value: Any, rows: List[Dict[str, str]], section: str) -> None:
    if isinstance(value, dict) and value:
        for key in sorted(value):
            _flatten(f"{prefix}.{key}" if prefix else key, value[key], rows, section)
    elif isinstance(value, list) and value and all(isinstance(v, (dict, list)) for v in value):
        for i, item in enumerate(value):
            _flatten(f"{prefix}[{i}]", item, rows, section)
    else:
        shown = value if isinstance(value, str) else json.dumps(value)
        rows.append({"Section": section, "Key": prefix, "Value": shown})


def summary_frame(report: Report) -> pd.DataFrame:
    """One row per scalar leaf of inputs, outputs and certificates."""
    rows: List[Dict[str, str]] = []
    for section in ("inputs", "outputs", "certificates"):
        _flatten("", getattr(report, section), rows, section)
    if not rows:
        return pd.DataFrame(columns=["Section", "Key", "Value"])
    return pd.DataFrame(rows)


def table_frames(report: Report) -> Dict[str, pd.DataFrame]:
    return {name: pd.DataFrame(rows) for name, rows in sorted(report.tables.items()) if rows}


def render_table(report: Report) -> str:
    with pd.option_context("display.max_colwidth", 80, "display.width", 160):
        parts = [f"== {report.command} ==", summary_frame(report).to_string(index=False)]
        for name, frame in table_frames(report).items():
            parts += ["", f"-- {name} --", frame.to_string(index=False)]
    return "\n".join(parts) + "\n"


def render(report: Report, fmt: str = "json", timing: bool = True) -> str:
    if fmt == "table":
        return render_table(report)
    return report.dumps(timing)


def write_csv_tables(report: Report, directory) -> List[str]:
    """Each table as <command>_<name>.csv; returns the written paths."""
    out = []
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name, frame in table_frames(report).items():
        path = directory / f"{report.command}_{name}.csv"
        frame.to_csv(path, index=False)
        out.append(str(path))
    return out
