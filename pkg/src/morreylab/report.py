"""Experiment reports: structured-text documents plus CSV roll-ups.

Reports are deterministic given the config and seed; the timestamp is
the only volatile field and is excluded from the content hash.  Numbers
are written with 17 significant digits so round-trips are exact.
"""

from __future__ import annotations

import csv
import hashlib
import json
import platform
import sys
import time

import numpy as np
import scipy

__all__ = ["build_report", "report_to_json", "report_from_json", "write_csv",
           "write_decay_table", "report_hash"]


def _fmt(x):
    if isinstance(x, float):
        return float(repr(x))
    return x


def _sanitize(obj):
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def environment_fingerprint() -> dict:
    return {
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "platform": platform.platform(),
    }


def build_report(records, config_echo: dict, seed: int) -> dict:
    """Assemble the structured report; every configured check appears once.

    Wall-clock data (timestamp, durations) lives in fields excluded from
    the content hash, so re-runs with one seed hash identically.
    """
    names = [r.name for r in records]
    if len(names) != len(set(names)):
        raise ValueError("duplicate check records in one report")
    return {
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
        "timings": {r.name: _fmt(round(r.duration, 6)) for r in records},
        "seed": seed,
        "environment": environment_fingerprint(),
        "config": _sanitize(config_echo),
        "checks": [
            {
                "name": r.name,
                "passed": bool(r.passed),
                "details": _sanitize(r.details),
            }
            for r in records
        ],
        "all_passed": all(r.passed for r in records),
    }


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=1, sort_keys=True)


def report_from_json(text: str) -> dict:
    return json.loads(text)


def report_hash(report: dict) -> str:
    """Content hash ignoring wall-clock fields (timestamp, timings)."""
    body = {k: v for k, v in report.items() if k not in ("timestamp", "timings")}
    return hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()


def _flatten(details: dict, prefix: str = ""):
    for k, v in sorted(details.items()):
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flatten(v, key + ".")
        elif isinstance(v, (list, tuple)):
            yield key, ";".join(_num17(x) for x in v)
        else:
            yield key, _num17(v)


def _num17(x):
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, (int,)):
        return str(x)
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def write_csv(report: dict, path) -> None:
    """Roll-up table: one row per check, stable column order."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["check", "passed", "key", "value"])
        for rec in report["checks"]:
            writer.writerow([rec["name"], str(rec["passed"]).lower(), "", ""])
            for key, value in _flatten(rec["details"]):
                writer.writerow([rec["name"], "", key, value])


def write_decay_table(path, times, norms, predicted_slope: float, anchor: float) -> None:
    """Gnuplot-ready columns: t, measured norm, predicted power law."""
    times = np.asarray(times, dtype=float)
    norms = np.asarray(norms, dtype=float)
    with open(path, "w") as fh:
        fh.write("# t norm predicted\n")
        for t, v in zip(times, norms):
            pred = anchor * t**predicted_slope
            fh.write(f"{t:.17g} {v:.17g} {pred:.17g}\n")
