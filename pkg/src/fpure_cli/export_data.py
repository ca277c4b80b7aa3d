"""
Tabular rendering and export of reports: pandas frames for text output and CSV files,
deterministic JSON for everything else.

The frame builders accept report objects or their `to_dict()` forms, so a
replayed JSON payload renders exactly like a fresh computation.
"""
import json
import logging
import os

import pandas as pd

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["e", "q", "fpure", "theta", "loewy", "b", "fpt", "dfpt", "mfpt", "height", "clamped"]
STRATA_COLUMNS = ["prime", "height", "dimS_P", "e", "theta", "dfpt", "mfpt", "minimal_presentation"]


def _as_dict(item):
    return item.to_dict() if hasattr(item, "to_dict") else dict(item)


def _interval_text(rendered):
    if rendered is None:
        return None
    return f"[{rendered[0]}, {rendered[1]}]"


def reports_frame(reports):
    """One row per InvariantReport."""
    rows = []
    for r in map(_as_dict, reports):
        row = {c: r.get(c) for c in REPORT_COLUMNS}
        for c in ("fpt", "dfpt", "mfpt"):
            row[c] = _interval_text(row[c])
        rows.append(row)
    return pd.DataFrame(rows, columns=REPORT_COLUMNS)


def strata_frame(strata):
    """One row per StratumRecord."""
    rows = []
    for s in map(_as_dict, strata):
        row = {c: s.get(c) for c in STRATA_COLUMNS}
        row["prime"] = "(" + ",".join(s["prime"]) + ")"
        row["theta"] = str(s["theta"])
        row["dfpt"] = _interval_text(row["dfpt"])
        row["mfpt"] = _interval_text(row["mfpt"])
        rows.append(row)
    return pd.DataFrame(rows, columns=STRATA_COLUMNS)


def verdicts_frame(records):
    """Flatten check records into a frame; nested values are shown as JSON."""
    flat = []
    for record in map(_as_dict, records):
        row = {}
        for k, v in record.items():
            row[k] = json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v
        flat.append(row)
    return pd.DataFrame(flat)


def render_table(frame):
    """Aligned text for the terminal."""
    if frame.empty:
        return "(no rows)"
    return frame.to_string(index=False)


def export_csv(frame, output_dir, stem):
    """Write `frame` to <output_dir>/<stem>.csv and return the path."""
    os.makedirs(output_dir, exist_ok=True)
    output_file = os.path.join(output_dir, f"{stem}.csv")
    frame.to_csv(output_file, index=False)
    logger.info(f"Table saved to {output_file}")
    return output_file


def to_json(obj):
    """Deterministic JSON text: sorted keys, two-space indent."""
    return json.dumps(obj, sort_keys=True, indent=2)
