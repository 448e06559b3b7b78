"""Result tables and their CSV / JSON serialisation."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence


@dataclass
class ResultTable:
    name: str
    columns: list[str]
    rows: list[list[Any]]
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != n:
                raise ValueError(f"row {i} of table {self.name!r} has {len(row)} cells, expected {n}")

    def column(self, name: str) -> list[Any]:
        k = self.columns.index(name)
        return [r[k] for r in self.rows]


def format_cell(value: Any) -> str:
    """Text form of one cell; floats use 17 significant digits (exact round trip)."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def to_csv(table: ResultTable) -> str:
    buf = io.StringIO()
    for key, value in table.metadata.items():
        buf.write(f"# {key}: {format_cell(value)}\n")
    writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_cell(v) for v in row])
    return buf.getvalue()


def _json_cell(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return format_cell(value)
    return value


def to_json(table: ResultTable) -> str:
    doc = {
        "metadata": {k: _json_cell(v) for k, v in table.metadata.items()},
        "columns": list(table.columns),
        "rows": [[_json_cell(v) for v in row] for row in table.rows],
    }
    return json.dumps(doc, indent=1) + "\n"


def emit(table: ResultTable, fmt: str, path) -> Path:
    path = Path(path)
    if fmt == "csv":
        text = to_csv(table)
    elif fmt == "json":
        text = to_json(table)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    path.write_text(text, encoding="utf-8")
    return path


def read_csv(path) -> tuple[dict[str, str], list[str], list[list[str]]]:
    """Inverse of :func:`to_csv` (values stay as text)."""
    meta: dict[str, str] = {}
    body: list[str] = []
    for line in Path(path).read_text(encoding="utf-8").splitlines(keepends=True):
        if line.startswith("# ") and not body:
            k, _, v = line[2:].rstrip("\n").partition(": ")
            meta[k] = v
        else:
            body.append(line)
    rows = list(csv.reader(body))
    return meta, rows[0], rows[1:]


def data_section(text: str) -> str:
    """Everything below the metadata lines."""
    return "".join(line for line in text.splitlines(keepends=True) if not line.startswith("# "))


def plot_script(table: ResultTable, data_file: str, x: str, ys: Sequence[str],
                kind: str = "line", z: str | None = None) -> str:
    """Standalone matplotlib script reading ``data_file`` next to itself."""
    lines = [
        "import csv",
        "import os",
        "",
        "import matplotlib.pyplot as plt",
        "",
        f"DATA = os.path.join(os.path.dirname(os.path.abspath(__file__)), {data_file!r})",
        "",
        "with open(DATA, newline='') as fh:",
        "    rows = list(csv.DictReader(line for line in fh if not line.startswith('#')))",
        "",
    ]
    if kind == "map":
        lines += [
            f"xs = sorted({{float(r[{x!r}]) for r in rows}})",
            f"ys = sorted({{float(r[{ys[0]!r}]) for r in rows}})",
            f"grid = {{(float(r[{x!r}]), float(r[{ys[0]!r}])): float(r[{z!r}]) for r in rows}}",
            "zs = [[grid[(xv, yv)] for xv in xs] for yv in ys]",
            "fig, ax = plt.subplots()",
            "mesh = ax.pcolormesh(xs, ys, zs, shading='nearest')",
            f"fig.colorbar(mesh, label={z!r})",
            f"ax.set_xlabel({x!r})",
            f"ax.set_ylabel({ys[0]!r})",
        ]
    else:
        lines += [
            "fig, ax = plt.subplots()",
            f"x = [float(r[{x!r}]) for r in rows]",
        ]
        for y in ys:
            lines.append(f"ax.plot(x, [float(r[{y!r}]) for r in rows], label={y!r})")
        lines += [f"ax.set_xlabel({x!r})", "ax.legend()"]
    lines += [
        f"ax.set_title({table.name!r})",
        "fig.tight_layout()",
        "out = os.path.splitext(DATA)[0] + '.png'",
        "fig.savefig(out, dpi=150)",
        "print(out)",
        "",
    ]
    return "\n".join(lines)
