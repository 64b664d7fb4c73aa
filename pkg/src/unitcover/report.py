"""Report documents and their table / csv / json renderings."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any

VOLUME_COLUMNS = ("param", "mean", "sigma", "max")


def fmt_num(x: Any) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return "%.7g" % x
    if x is None:
        return ""
    return str(x)


@dataclass
class ReportDocument:
    """Tabular rows (``columns`` order) or a flat mapping of scalar results."""

    meta: dict[str, Any]
    rows: list[dict[str, Any]] = field(default_factory=list)
    result: dict[str, Any] | None = None
    columns: tuple[str, ...] = VOLUME_COLUMNS

    def to_obj(self) -> dict[str, Any]:
        if self.result is not None:
            return {"meta": dict(self.meta), "result": dict(self.result)}
        meta = dict(self.meta)
        if self.columns != VOLUME_COLUMNS:
            meta["columns"] = list(self.columns)
        return {"meta": meta, "rows": [{c: r[c] for c in self.columns} for r in self.rows]}

    def to_json(self) -> str:
        return json.dumps(self.to_obj(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> ReportDocument:
        obj = json.loads(text)
        meta = dict(obj["meta"])
        if "result" in obj:
            return cls(meta=meta, result=dict(obj["result"]))
        columns = tuple(meta.pop("columns", VOLUME_COLUMNS))
        return cls(meta=meta, rows=[dict(r) for r in obj["rows"]], columns=columns)


def _csv(doc: ReportDocument) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if doc.result is not None:
        w.writerow(["name", "value"])
        for k, v in doc.result.items():
            w.writerow([k, fmt_num(v)])
    else:
        w.writerow(doc.columns)
        for r in doc.rows:
            w.writerow([fmt_num(r[c]) for c in doc.columns])
    return buf.getvalue()


def _table(doc: ReportDocument) -> str:
    head = "  ".join(f"{k}={fmt_num(v)}" for k, v in doc.meta.items())
    lines = [f"# {head}"]
    if doc.result is not None:
        width = max((len(k) for k in doc.result), default=0)
        lines += [f"{k:<{width}}  {fmt_num(v)}" for k, v in doc.result.items()]
    else:
        names = list(doc.columns)
        if names and names[0] == "param":
            names[0] = str(doc.meta.get("param", "param"))
        cells = [[fmt_num(r[c]) for c in doc.columns] for r in doc.rows]
        widths = [max([len(n)] + [len(row[i]) for row in cells]) for i, n in enumerate(names)]
        lines.append("  ".join(n.rjust(wd) for n, wd in zip(names, widths)))
        lines += ["  ".join(c.rjust(wd) for c, wd in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def render_report(doc: ReportDocument, format: str = "table") -> str:
    if format == "json":
        return doc.to_json()
    if format == "csv":
        return _csv(doc)
    if format == "table":
        return _table(doc)
    raise ValueError(f"unknown format {format!r}")
