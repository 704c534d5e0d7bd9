"""Result emission: checks.csv (one row per check), traces.csv (downsampled
per-level series for plotting), records.json (full records plus sweep
summary).

All files are UTF-8 with LF line endings; reals carry 17 significant
digits with '.' as the decimal separator, so re-parsing recovers the exact
doubles.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from .config import canonical_json, format_real
from .errors import IoError, ParseError
from .runner import CheckResult, ResultRecord

CHECKS_COLUMNS = (
    "scenario_id",
    "check",
    "status",
    "margin",
    "fitted_constant",
    "grid",
    "dt",
    "M",
    "T",
    "lambda",
    "gamma",
)

TRACES_COLUMNS = (
    "scenario_id",
    "time",
    "H",
    "D",
    "N",
    "theta",
    "Phi",
    "l2",
    "h10",
    "hm1",
    "zeta",
)


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format_real(v) if math.isfinite(v) else ""
    if isinstance(v, int):
        return str(v)
    return str(v)


def _write_text(path, text: str) -> None:
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def render_checks_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CHECKS_COLUMNS)
    for rec in records:
        p = rec.params
        for c in rec.checks:
            w.writerow(
                [
                    rec.scenario_id,
                    c.name,
                    c.status,
                    _cell(c.margin),
                    _cell(c.fitted_constant),
                    _cell(p.get("grid")),
                    _cell(p.get("dt")),
                    _cell(p.get("M")),
                    _cell(p.get("T")),
                    _cell(p.get("lambda")),
                    _cell(p.get("gamma")),
                ]
            )
    return buf.getvalue()


def render_traces_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACES_COLUMNS)
    for rec in records:
        times = rec.traces.get("times", [])
        for i, t in enumerate(times):
            row = [rec.scenario_id, _cell(float(t))]
            for key in TRACES_COLUMNS[2:]:
                series = rec.traces.get(key)
                row.append(_cell(float(series[i])) if series else "")
            w.writerow(row)
    return buf.getvalue()


def render_records_json(records, summary=None) -> str:
    doc = {
        "records": [rec.to_dict(include_wall_time=True) for rec in records],
        "summary": summary,
    }
    return canonical_json(doc) + "\n"


def write_checks_csv(records, path) -> None:
    _write_text(path, render_checks_csv(records))


def write_traces_csv(records, path) -> None:
    _write_text(path, render_traces_csv(records))


def write_records_json(records, path, summary=None) -> None:
    _write_text(path, render_records_json(records, summary))


def emit_results(records, out_dir, summary=None) -> dict:
    """Write all three artifacts into out_dir; returns their paths."""
    out = Path(out_dir)
    paths = {
        "checks": out / "checks.csv",
        "traces": out / "traces.csv",
        "records": out / "records.json",
    }
    write_checks_csv(records, paths["checks"])
    write_traces_csv(records, paths["traces"])
    write_records_json(records, paths["records"], summary)
    return paths


def _record_from_dict(d: dict) -> ResultRecord:
    checks = [
        CheckResult(
            name=c["name"],
            status=c["status"],
            margin=c.get("margin"),
            fitted_constant=c.get("fitted_constant"),
            note=c.get("note", ""),
            extras=c.get("extras", {}),
        )
        for c in d.get("checks", [])
    ]
    return ResultRecord(
        scenario_id=d["scenario_id"],
        label=d.get("label", ""),
        tag=d.get("tag", "single"),
        config_digest=d.get("config_digest", ""),
        params=d.get("params", {}),
        checks=checks,
        traces=d.get("traces", {}),
        wall_time=float(d.get("wall_time", 0.0)),
    )


def load_records_json(path):
    """Read records.json back into (records, summary)."""
    path = Path(path)
    if not path.exists():
        raise IoError(f"results file {path} does not exist")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict) or "records" not in doc:
        raise ParseError(f"{path}: missing 'records' array")
    records = [_record_from_dict(d) for d in doc["records"]]
    return records, doc.get("summary")


def read_checks_csv(path):
    """checks.csv rows as dicts (strings as written)."""
    path = Path(path)
    if not path.exists():
        raise IoError(f"results file {path} does not exist")
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    return rows
