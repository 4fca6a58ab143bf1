"""CSV/JSON persistence for result tables.

Floats are written with 17 significant digits, so re-emitting an identical
table gives a byte-identical file. Columns listed in VOLATILE_COLUMNS
(timings) are dropped unless explicitly requested, for the same reason.
"""

import csv
import io
import json
import platform
from enum import Enum

import numpy as np

from .. import __version__
from ..errors import EmitError
from ..table import Table

VOLATILE_COLUMNS = ("wall_time",)


class Format(str, Enum):
    CSV = "csv"
    JSON = "json"


def format_value(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, Enum):
        return str(v.value)
    return str(v)


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    if isinstance(v, Enum):
        return v.value
    return v


def to_csv_text(table):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([format_value(v) for v in row])
    return buf.getvalue()


def to_json_text(table):
    doc = {
        "columns": list(table.columns),
        "data": {c: [_json_value(r[j]) for r in table.rows] for j, c in enumerate(table.columns)},
    }
    # NaN is kept as the bare token Python's json module reads back
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


def sidecar_path(path):
    return str(path) + ".meta.json"


def software_versions():
    import numba
    import scipy
    return {
        "nhloc": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "numba": numba.__version__,
        "python": platform.python_version(),
    }


def _write(path, text):
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise EmitError(f"cannot write {path}: {exc}") from exc


def emit(table, path, fmt=Format.CSV, metadata=None, include_volatile=False):
    """Write ``table`` to ``path`` and a metadata sidecar next to it.

    ``metadata`` should hold the grid description and seeds; software
    versions are added here. No timestamps are recorded.
    """
    fmt = Format(fmt)
    if not include_volatile:
        table = table.drop(VOLATILE_COLUMNS)
    text = to_csv_text(table) if fmt is Format.CSV else to_json_text(table)
    _write(path, text)
    meta = {
        "format": fmt.value,
        "columns": list(table.columns),
        "n_rows": len(table),
        "software": software_versions(),
        "run": metadata or {},
    }
    _write(sidecar_path(path), json.dumps(meta, indent=1, sort_keys=True, default=str) + "\n")


def _parse(token):
    for cast in (int, float):
        try:
            return cast(token)
        except ValueError:
            pass
    if token in ("true", "false"):
        return token == "true"
    return token


def load(path, fmt=None):
    """Read a table written by emit(). CSV cells are parsed as int, float or str."""
    path = str(path)
    if fmt is None:
        fmt = Format.JSON if path.endswith(".json") else Format.CSV
    fmt = Format(fmt)
    try:
        with open(path, newline="") as fh:
            text = fh.read()
    except OSError as exc:
        raise EmitError(f"cannot read {path}: {exc}") from exc
    if fmt is Format.JSON:
        doc = json.loads(text)
        cols = doc["columns"]
        n = len(doc["data"][cols[0]]) if cols else 0
        return Table(cols, [tuple(doc["data"][c][i] for c in cols) for i in range(n)])
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    return Table(header, [tuple(_parse(x) for x in r) for r in reader])

