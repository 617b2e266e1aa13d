"""Deterministic text output with atomic replacement."""

import csv
import io
import os
import tempfile

import numpy as np


def fmt(value):
    """Format a number with 10 significant digits; other values via ``str``."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if np.isnan(v):
            return "nan"
        return f"{v:.10g}"
    return str(value)


def csv_text(rows, columns):
    """CSV text for a list of dicts, in ``columns`` order."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row.get(c, "")) for c in columns])
    return buf.getvalue()


def atomic_write_text(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_outputs(outputs):
    """Write ``{path: text}`` only after every artifact has been computed."""
    for path in sorted(outputs):
        atomic_write_text(path, outputs[path])
    return sorted(outputs)
