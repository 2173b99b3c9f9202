"""CSV and JSON rendering of command payloads.

Renderers consume the plain-dict (JSON) form of each result so the command
line produces identical bytes whether a payload was computed in-process or
fetched from the HTTP service.  CSV output is RFC-4180 style: one header
row, comma separation, newline-terminated rows, quoting only where needed.
"""

from __future__ import annotations

import csv
import io
import json

from .model import EventLog, InsertEvent

__all__ = [
    "dumps_json",
    "analytic_csv",
    "summaries_csv",
    "verdicts_csv",
    "lln_csv",
    "clt_csv",
    "azuma_csv",
    "event_log_csv",
    "render",
]


def dumps_json(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _bool(value) -> str:
    if value is None:
        return "info"
    return "true" if value else "false"


def _table(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def analytic_csv(report: dict) -> str:
    rows = [
        [key, repr(value), report["refs"].get(key, "")]
        for key, value in report["values"].items()
    ]
    return _table(["quantity", "value", "reference"], rows)


def summaries_csv(payload: dict) -> str:
    rows = [
        [
            s["run"],
            s["covered"],
            s["visits_to_start"],
            _bool(s["at_start_at_horizon"]),
            _bool(s["no_second_visit"]),
            s["final_vertex_count"],
        ]
        for s in payload["summaries"]
    ]
    return _table(
        [
            "run",
            "covered",
            "visits_to_start",
            "at_start_at_horizon",
            "no_second_visit",
            "final_vertex_count",
        ],
        rows,
    )


def verdicts_csv(payload: dict) -> str:
    rows = [
        [
            v["quantity"],
            repr(v["analytic"]),
            repr(v["estimate"]["mean"]),
            repr(v["estimate"]["stderr"]),
            "" if v["z_score"] is None else repr(v["z_score"]),
            _bool(v["passed"]),
        ]
        for v in payload["verdicts"]
    ]
    return _table(["quantity", "analytic", "mc_mean", "stderr", "z", "pass"], rows)


def lln_csv(payload: dict) -> str:
    rows = [[p["horizon"], repr(p["ratio"])] for p in payload["points"]]
    return _table(["horizon", "ratio"], rows)


def clt_csv(payload: dict) -> str:
    row = [
        repr(payload["ks_distance"]),
        repr(payload["threshold"]),
        _bool(payload["passed"]),
        payload["n_runs"],
        payload["horizon"],
    ]
    return _table(["ks_distance", "threshold", "pass", "n_runs", "horizon"], [row])


def azuma_csv(payload: dict) -> str:
    rows = [
        [
            repr(r["threshold"]),
            repr(r["empirical_tail"]),
            repr(r["bound"]),
            repr(r["stderr"]),
            _bool(r["passed"]),
        ]
        for r in payload["rows"]
    ]
    return _table(["threshold", "empirical_tail", "bound", "stderr", "pass"], rows)


def event_log_csv(log: EventLog) -> str:
    rows = []
    for ev in log.events:
        if isinstance(ev, InsertEvent):
            rows.append([repr(ev.time), "insert", "", ev.vertex])
        else:
            rows.append([repr(ev.time), "move", ev.source, ev.target])
    return _table(["time", "kind", "from", "to"], rows)


_CSV_RENDERERS = {
    "analytic": analytic_csv,
    "simulate": summaries_csv,
    "verify": verdicts_csv,
    "lln": lln_csv,
    "clt": clt_csv,
    "azuma": azuma_csv,
}


def render(kind: str, payload: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps_json(payload)
    return _CSV_RENDERERS[kind](payload)
