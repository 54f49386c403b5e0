"""Deterministic CSV/JSON writers with self-describing metadata headers."""

import csv
import io
import json
import math
import os
import platform

import numpy as np
import scipy

from . import __version__
from .config import ScenarioConfig, describe_units

OUTPUT_ENV = "POLFOCK_OUTPUT_DIR"


def metadata(cfg: ScenarioConfig):
    """Everything needed to re-run a job: resolved config, units and versions."""
    model = cfg.model()
    return {
        "package": "polfock",
        "version": __version__,
        "scenario": cfg.scenario,
        "config": cfg.to_dict(),
        "derived": {"omega_c_hartree": cfg.omega_c, "model": _plain(model.describe())},
        "units": describe_units(),
        "environment": {"python": platform.python_version(), "numpy": np.__version__,
                        "scipy": scipy.__version__},
    }


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def dumps_json(obj):
    return json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"


def format_table(table, meta):
    buf = io.StringIO()
    for key in sorted(meta):
        buf.write(f"# {key}: {json.dumps(_plain(meta[key]), sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def read_table(path):
    """Inverse of :func:`format_table`: (columns, rows as strings, metadata)."""
    meta, lines = {}, []
    with open(path) as fh:
        for line in fh:
            if line.startswith("# "):
                key, _, val = line[2:].partition(": ")
                meta[key] = json.loads(val)
            else:
                lines.append(line)
    rows = list(csv.reader(lines))
    return rows[0], rows[1:], meta


def write_result(result, cfg: ScenarioConfig, directory, emit_long=False):
    """Write tables, optional long tables, summary and metadata; return the paths."""
    os.makedirs(directory, exist_ok=True)
    meta = metadata(cfg)
    written = []
    tables = dict(result.tables)
    if emit_long:
        tables.update(result.long_tables)
    for name, table in tables.items():
        path = os.path.join(directory, f"{name}.csv")
        with open(path, "w", newline="") as fh:
            fh.write(format_table(table, meta))
        written.append(path)
    for name, obj in (("summary", {**meta, "summary": result.summary}),
                      ("metadata", meta)):
        path = os.path.join(directory, f"{name}.json")
        with open(path, "w") as fh:
            fh.write(dumps_json(obj))
        written.append(path)
    return written


def resolve_output_dir(cli_value, cfg: ScenarioConfig):
    """--output-dir, then output.directory, then $POLFOCK_OUTPUT_DIR/<scenario>."""
    if cli_value:
        return cli_value
    if cfg.output_directory:
        return cfg.output_directory
    base = os.environ.get(OUTPUT_ENV, "polfock-output")
    return os.path.join(base, cfg.scenario)
