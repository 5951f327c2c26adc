"""CSV files with a ``#``-prefixed provenance header and summary trailer.

Layout::

    # bondising-csv: 1
    # <key>: <json value>          (header block: command, version, hashes, ...)
    col_a,col_b,...
    ...rows...
    # <key>: <json value>          (trailer block: summaries, warnings)

Floats are written with 17 significant digits so every value round-trips.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

__all__ = ["CsvDocument", "format_value", "write_csv", "read_csv", "MAGIC"]

MAGIC = "bondising-csv"
FORMAT_VERSION = 1


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return format(v, ".17g")
    return str(v)


@dataclass
class CsvDocument:
    columns: list
    rows: list = field(default_factory=list)
    header: dict = field(default_factory=dict)
    trailer: dict = field(default_factory=dict)

    def column(self, name):
        return [r[name] for r in self.rows]


def _meta_lines(meta: dict) -> list[str]:
    return [f"# {k}: {json.dumps(v, sort_keys=True)}" for k, v in meta.items()]


def write_csv(path, doc: CsvDocument) -> bytes:
    """Write ``doc`` and return the bytes written."""
    buf = io.StringIO()
    buf.write(f"# {MAGIC}: {FORMAT_VERSION}\n")
    for line in _meta_lines(doc.header):
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(doc.columns)
    for row in doc.rows:
        if len(row) != len(doc.columns):
            raise ValueError(f"row has {len(row)} fields, expected {len(doc.columns)}")
        writer.writerow([format_value(row[c]) for c in doc.columns])
    for line in _meta_lines(doc.trailer):
        buf.write(line + "\n")
    data = buf.getvalue().encode()
    Path(path).write_bytes(data)
    return data


def _parse_field(text: str):
    if text == "":
        return None
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def read_csv(path) -> CsvDocument:
    """Parse a file produced by :func:`write_csv`; numeric fields come back as int/float."""
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith(f"# {MAGIC}:"):
        raise ValueError(f"{path} is not a {MAGIC} file")
    header, trailer = {}, {}
    body = []
    in_body = False
    for line in lines[1:]:
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(":")
            (trailer if in_body else header)[key.strip()] = json.loads(value)
        else:
            in_body = True
            body.append(line)
    reader = csv.reader(body)
    columns = next(reader)
    rows = []
    for fields in reader:
        if len(fields) != len(columns):
            raise ValueError(f"row has {len(fields)} fields, expected {len(columns)}")
        rows.append({c: _parse_field(f) for c, f in zip(columns, fields)})
    return CsvDocument(columns, rows, header, trailer)
