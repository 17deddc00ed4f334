"""Deterministic artifact writers and readers.

All numeric text is emitted with 17 significant digits so a fixed
configuration and seed reproduce byte-identical files.  Formats:

* solution snapshots — CSV, header ``x,<component names>``, one file per
  configured time, stair-stepped so the rows trace the exact
  piecewise-constant profile;
* front log — JSON lines; ``"record": "event"`` rows carry one
  interaction each (time, position, incoming/outgoing front kinds and
  sizes, functional values ``V``, ``Q``, ``Upsilon`` after the event);
  ``"record": "segment"`` rows carry one straight x-t piece per front
  between interactions (id, kind, family, size, speed, endpoints
  ``t0,x0,t1,x1`` on the front's own line, so slope equals speed);
* functional series — CSV with header ``time,V,Q,Upsilon``;
* run summary — JSON object (total-variation peak, functional
  monotonicity flag, junction defect peak, wall time, ...);
* study report — CSV with header
  ``h,epsilon,distance,tv_max,upsilon_final,junction_defect_max`` plus a
  machine-readable pass/fail summary JSON.

Each run owns one directory; an existing non-empty directory is refused
unless overwriting is requested explicitly.
"""

import json
import math
import os

from .errors import ConfigError

SNAPSHOT_NAME = "snapshot_%03d.csv"
SNAPSHOT_INDEX_NAME = "snapshots.csv"
FRONT_LOG_NAME = "fronts.jsonl"
FUNCTIONALS_NAME = "functionals.csv"
SUMMARY_NAME = "summary.json"
STUDY_NAME = "study.csv"
STUDY_SUMMARY_NAME = "study_summary.json"

STUDY_COLUMNS = ("h", "epsilon", "distance", "tv_max", "upsilon_final",
                 "junction_defect_max")


def format_float(value):
    """17-significant-digit decimal text; NaN and infinities spelled out."""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return "%.17g" % value


def dumps_canonical(obj):
    """JSON text with sorted keys and 17-digit floats (NaN becomes null)."""
    if obj is None or obj is True or obj is False:
        return json.dumps(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if math.isnan(obj):
            return "null"
        if math.isinf(obj):
            return '"inf"' if obj > 0 else '"-inf"'
        return format_float(obj)
    if isinstance(obj, dict):
        items = ("%s:%s" % (json.dumps(str(k)), dumps_canonical(v))
                 for k, v in sorted(obj.items(), key=lambda kv: str(kv[0])))
        return "{" + ",".join(items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(dumps_canonical(v) for v in obj) + "]"
    try:
        return dumps_canonical(float(obj))
    except (TypeError, ValueError):
        raise ConfigError("cannot serialize %r" % (obj,))


def ensure_run_directory(path, force=False):
    """Create (or clear the way for) a run's artifact directory."""
    if os.path.exists(path):
        if not os.path.isdir(path):
            raise ConfigError("%s exists and is not a directory" % path)
        if os.listdir(path) and not force:
            raise ConfigError(
                "output directory %s is not empty (use --force)" % path)
    else:
        os.makedirs(path)
    return path


def _stair_rows(positions, states, window):
    """Rows tracing a left-continuous piecewise-constant profile."""
    x_lo, x_hi = float(window[0]), float(window[1])
    rows = [(x_lo, states[0])]
    for x, (left, right) in zip(positions, zip(states, states[1:])):
        x = float(x)
        if x <= x_lo or x >= x_hi:
            continue
        rows.append((x, left))
        rows.append((x, right))
    rows.append((x_hi, states[-1]))
    return rows


def write_snapshot_csv(path, component_names, positions, states, window):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x," + ",".join(component_names) + "\n")
        for x, state in _stair_rows(positions, states, window):
            fh.write(format_float(x) + ","
                     + ",".join(format_float(v) for v in state) + "\n")
    return path


def write_snapshot_series(directory, component_names, trajectory, window):
    """One stair CSV per stored snapshot plus an index CSV mapping
    file names to times.  Returns the index rows."""
    index = []
    for i, snap in enumerate(trajectory.snapshots):
        name = SNAPSHOT_NAME % i
        write_snapshot_csv(os.path.join(directory, name), component_names,
                           snap["positions"], snap["states"], window)
        index.append((name, float(snap["time"])))
    index_path = os.path.join(directory, SNAPSHOT_INDEX_NAME)
    with open(index_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("file,time\n")
        for name, t in index:
            fh.write("%s,%s\n" % (name, format_float(t)))
    return index


def write_functionals_csv(path, series):
    """``series`` holds (time, V, Q, Upsilon) rows."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("time,V,Q,Upsilon\n")
        for row in series:
            fh.write(",".join(format_float(v) for v in row[:4]) + "\n")
    return path


def write_front_log(path, events, segments=()):
    """JSON-lines front log: the interaction records tagged
    ``"record": "event"`` followed by the x-t pieces tagged
    ``"record": "segment"``; all canonical JSON."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in events:
            fh.write(dumps_canonical(dict(record, record="event")) + "\n")
        for record in segments:
            fh.write(dumps_canonical(dict(record, record="segment")) + "\n")
    return path


def write_summary(path, summary):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_canonical(summary) + "\n")
    return path


def read_summary(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError("cannot read summary %s: %s" % (path, exc))
    except ValueError as exc:
        raise ConfigError("malformed summary %s: %s" % (path, exc))


def write_study_csv(path, rows):
    """``rows`` are dicts carrying at least the study columns."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(STUDY_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(format_float(row[c]) for c in STUDY_COLUMNS)
                     + "\n")
    return path


def read_study_csv(path):
    rows = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
            if header != list(STUDY_COLUMNS):
                raise ConfigError("unexpected study header in %s" % path)
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                parts = line.split(",")
                if len(parts) != len(STUDY_COLUMNS):
                    raise ConfigError("bad study row in %s: %r"
                                      % (path, line))
                rows.append({c: float(v)
                             for c, v in zip(STUDY_COLUMNS, parts)})
    except OSError as exc:
        raise ConfigError("cannot read study %s: %s" % (path, exc))
    return rows


def run_summary(tracker, wall_time, extra=None):
    """Assemble the standard summary document for a finished run."""
    series = tracker.functional_series
    monotone = all(b[3] <= a[3] + 1e-12
                   for a, b in zip(series, series[1:]))
    summary = {
        "events": tracker.events_resolved,
        "tv_max": float(tracker.tv_max),
        "upsilon_initial": float(series[0][3]),
        "upsilon_final": float(series[-1][3]),
        "upsilon_monotone": monotone,
        "junction_defect_max": float(tracker.max_junction_defect()),
        "nonphysical_strength": float(tracker.nonphysical_strength()),
        "front_count": len(tracker._fronts),
        "time": float(tracker.time),
        "wall_time": float(wall_time),
    }
    if extra:
        summary.update(extra)
    return summary
