"""Deterministic CSV / JSON serialization; every float is written with 17 significant digits."""
from __future__ import annotations

import dataclasses
import json
import math
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from ._common import fmt17


def to_plain(obj: Any) -> Any:
    """Reduce dataclasses, arrays, Fractions and complex numbers to JSON-ready values."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        return [to_plain(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _num(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return fmt17(x)


def _dump(obj: Any, out: list, indent: int, level: int) -> None:
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            out.append(("," if i else "") + pad + json.dumps(k) + ": ")
            _dump(v, out, indent, level + 1)
        out.append(end + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        flat = all(not isinstance(v, (dict, list)) for v in obj)
        if flat:
            out.append("[")
            for i, v in enumerate(obj):
                out.append(", " if i else "")
                _dump(v, out, indent, level + 1)
            out.append("]")
            return
        out.append("[")
        for i, v in enumerate(obj):
            out.append(("," if i else "") + pad)
            _dump(v, out, indent, level + 1)
        out.append(end + "]")
    elif obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_num(obj))
    else:
        out.append(json.dumps(str(obj)))


def dumps_json(obj: Any, indent: int = 2) -> str:
    out: list[str] = []
    _dump(to_plain(obj), out, indent, 0)
    return "".join(out) + "\n"


def _cell(v: Any) -> str:
    v = to_plain(v)
    if isinstance(v, float):
        return _num(v)
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, dict) and set(v) == {"re", "im"}:
        return f"{_num(v['re'])}{'+' if not str(_num(v['im'])).startswith('-') else ''}{_num(v['im'])}j"
    if isinstance(v, list):
        return ";".join(_cell(x) for x in v)
    if v is None:
        return ""
    return str(v)


def dumps_csv(rows: Sequence[dict], columns: Sequence[str] | None = None) -> str:
    """Header plus one line per row; lists are joined with ';'."""
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    lines = [",".join(columns)]
    for r in rows:
        cells = []
        for c in columns:
            s = _cell(r.get(c))
            if any(ch in s for ch in ',"\n'):
                s = '"' + s.replace('"', '""') + '"'
            cells.append(s)
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


@dataclasses.dataclass
class Result:
    """Rows (the table), a summary dict and the name of its headline statistic."""

    command: str
    rows: list
    summary: dict
    headline: str

    def render(self, fmt: str = "csv") -> str:
        if fmt == "csv":
            return dumps_csv(self.rows)
        if fmt == "json":
            return dumps_json({"command": self.command, "summary": self.summary, "rows": self.rows})
        raise ValueError(f"unknown format {fmt!r}")

    def summary_line(self) -> str:
        val = self.summary.get(self.headline)
        val = _cell(val) if val is not None else "-"
        return f"{self.command}: {len(self.rows)} rows, {self.headline}={val}"
