"""Serialization of spectra and sweeps: CSV / json-lines plus plot scripts.

Every output file embeds the complete resolved run configuration in its
header so a result can always be traced back to its inputs.  Floats are
written with 17 significant digits (round-trip safe); the timestamp line
can be suppressed so repeated runs are byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .config import RunConfig, serialize_config

__all__ = [
    "OutputRecord",
    "single_record",
    "sweep_record",
    "write_record",
    "emit_plotscript",
]


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


@dataclass(frozen=True)
class OutputRecord:
    """Rows plus header metadata, ready for any supported format."""

    columns: tuple          # column names, constant per file
    rows: tuple             # tuples of floats, one per line
    config: RunConfig
    method: str             # "analytic" | "oracle" | "both" | "sweep/<method>"
    version: str


def single_record(config: RunConfig, version: str, analytic=None, oracle=None) -> OutputRecord:
    """Columns omega[, w_analytic][, w_oracle] from one or two spectra."""
    if analytic is None and oracle is None:
        raise ValueError("need at least one spectrum")
    base = analytic if analytic is not None else oracle
    columns = ["omega"]
    series = []
    if analytic is not None:
        columns.append("w_analytic")
        series.append(analytic.values)
    if oracle is not None:
        if analytic is not None and (
                oracle.omegas.shape != analytic.omegas.shape
                or not (oracle.omegas == analytic.omegas).all()):
            raise ValueError("analytic and oracle spectra must share one grid")
        columns.append("w_oracle")
        series.append(oracle.values)
    rows = tuple(
        (float(om), *(float(s[i]) for s in series))
        for i, om in enumerate(base.omegas)
    )
    method = "both" if analytic is not None and oracle is not None else (
        "analytic" if analytic is not None else "oracle")
    return OutputRecord(columns=tuple(columns), rows=rows, config=config,
                        method=method, version=version)


def sweep_record(config: RunConfig, version: str, sweep_result, method: str) -> OutputRecord:
    """Sweep-shaped rows (param_value, omega, w) for one method."""
    rows = []
    for value, spectrum in sweep_result.spectra(method):
        for om, w in zip(spectrum.omegas, spectrum.values):
            rows.append((float(value), float(om), float(w)))
    return OutputRecord(columns=("param_value", "omega", "w"), rows=tuple(rows),
                        config=config, method=f"sweep/{method}", version=version)


def _header_lines(record: OutputRecord, timestamp: bool) -> list:
    lines = [f"version: {record.version}", f"method: {record.method}"]
    if timestamp:
        lines.append(f"timestamp: {datetime.now(timezone.utc).isoformat()}")
    lines.append("config:")
    lines += [("  " + ln).rstrip() for ln in serialize_config(record.config).splitlines()]
    return lines


def write_record(record: OutputRecord, path, fmt: str = "csv",
                 timestamp: bool = True) -> None:
    path = Path(path)
    if fmt == "csv":
        _write_csv(record, path, timestamp)
    elif fmt == "json-lines":
        _write_jsonl(record, path, timestamp)
    else:
        raise ValueError(f"unknown output format {fmt!r}")


def _write_csv(record: OutputRecord, path: Path, timestamp: bool) -> None:
    with open(path, "w", newline="\n") as fh:
        for line in _header_lines(record, timestamp):
            fh.write(f"# {line}\n")
        fh.write(",".join(record.columns) + "\n")
        for row in record.rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_jsonl(record: OutputRecord, path: Path, timestamp: bool) -> None:
    header = {
        "version": record.version,
        "method": record.method,
        "columns": list(record.columns),
        "config": serialize_config(record.config),
    }
    if timestamp:
        header["timestamp"] = datetime.now(timezone.utc).isoformat()
    with open(path, "w", newline="\n") as fh:
        fh.write(json.dumps({"header": header}, sort_keys=True) + "\n")
        for row in record.rows:
            obj = {c: float(_fmt(v)) for c, v in zip(record.columns, row)}
            fh.write(json.dumps(obj, sort_keys=True) + "\n")


def read_columns(path) -> tuple:
    """(columns, rows) from a CSV or json-lines file written by write_record."""
    path = Path(path)
    first = path.open().readline()
    if first.startswith("{"):
        with open(path) as fh:
            header = json.loads(fh.readline())["header"]
            columns = header["columns"]
            rows = [[obj[c] for c in columns] for obj in map(json.loads, fh)]
        return tuple(columns), rows
    with open(path) as fh:
        columns = None
        rows = []
        for line in fh:
            if line.startswith("#") or not line.strip():
                continue
            if columns is None:
                columns = line.strip().split(",")
                continue
            rows.append([float(v) for v in line.strip().split(",")])
    if columns is None:
        raise ValueError(f"{path} contains no column header")
    return tuple(columns), rows


_PLOT_TEMPLATE = '''\
#!/usr/bin/env python3
"""Render {data_name} (auto-generated; edit freely)."""
import json
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

DATA = Path(__file__).resolve().parent / {data_name!r}


def load(path):
    first = path.open().readline()
    if first.startswith("{{"):
        with open(path) as fh:
            columns = json.loads(fh.readline())["header"]["columns"]
            rows = [[obj[c] for c in columns] for obj in map(json.loads, fh)]
        return columns, rows
    columns, rows = None, []
    for line in open(path):
        if line.startswith("#") or not line.strip():
            continue
        if columns is None:
            columns = line.strip().split(",")
            continue
        rows.append([float(v) for v in line.strip().split(",")])
    return columns, rows


columns, rows = load(DATA)
fig, ax = plt.subplots(figsize=(7, 4.5))
if columns[0] == "param_value":
    values = sorted({{r[0] for r in rows}})
    for v in values:
        pts = [(r[1], r[2]) for r in rows if r[0] == v]
        ax.plot([p[0] for p in pts], [p[1] for p in pts], label=f"{{v:g}}")
    ax.legend(title="swept value", fontsize=8)
else:
    for k, name in enumerate(columns[1:], start=1):
        ax.plot([r[0] for r in rows], [r[k] for r in rows], label=name)
    if len(columns) > 2:
        ax.legend()
ax.set_xlabel(r"$\\omega$ (units of $\\Gamma$)")
ax.set_ylabel(r"$W(\\omega)$")
ax.set_title({data_name!r})
fig.tight_layout()
out = DATA.with_suffix(".png")
fig.savefig(out, dpi=150)
print(f"wrote {{out}}")
'''


def emit_plotscript(data_path, script_path=None) -> Path:
    """Write a self-contained matplotlib script rendering an output file."""
    data_path = Path(data_path)
    if not data_path.exists():
        raise FileNotFoundError(f"data file not found: {data_path}")
    read_columns(data_path)  # validates the file shape early
    if script_path is None:
        script_path = data_path.with_suffix(".plot.py")
    script_path = Path(script_path)
    script_path.write_text(_PLOT_TEMPLATE.format(data_name=data_path.name))
    return script_path
