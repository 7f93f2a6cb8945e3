"""Column tables and the package's CSV dialect.

UTF-8, LF line endings, comma separated, no quoting. Floats use the shortest
representation that round-trips (``repr``); ``None`` becomes an empty field.
Optional ``# key=value`` comment lines precede the header.
"""
from __future__ import annotations

import math
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np


@dataclass
class Table:
    columns: tuple
    data: list  # one sequence per column
    comments: list = field(default_factory=list)  # (key, value) pairs

    def __post_init__(self):
        self.columns = tuple(self.columns)
        if len(self.columns) != len(self.data):
            raise ValueError("one data sequence per column required")
        lengths = {len(col) for col in self.data}
        if len(lengths) > 1:
            raise ValueError(f"ragged columns: lengths {sorted(lengths)}")

    def __len__(self):
        return len(self.data[0]) if self.data else 0

    def column(self, name):
        return self.data[self.columns.index(name)]

    def rows(self):
        return zip(*self.data)

    @classmethod
    def concat(cls, tables, prefix=None):
        """Stack tables with equal columns; ``prefix=(name, values)`` adds a leading column."""
        tables = list(tables)
        cols = tables[0].columns
        data = [np.concatenate([np.asarray(t.column(c)) for t in tables]) for c in cols]
        if prefix is not None:
            name, values = prefix
            lead = [v for v, t in zip(values, tables) for _ in range(len(t))]
            cols = (name,) + cols
            data = [lead] + data
        return cls(cols, data)


def format_value(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (str, np.str_)):
        return str(x)
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return ""
    return repr(x)


def to_csv(table: Table) -> str:
    lines = [f"# {k}={format_value(v)}" for k, v in table.comments]
    lines.append(",".join(table.columns))
    lines.extend(",".join(format_value(v) for v in row) for row in table.rows())
    return "\n".join(lines) + "\n"


def write_text(text: str, path=None) -> None:
    """Write to ``path`` atomically (temp file + rename), or to stdout when None."""
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", suffix=".csv", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_csv(text: str):
    """Parse the dialect back into (comments dict, header, rows of strings)."""
    comments, header, rows = {}, None, []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            comments[key] = value
        elif header is None:
            header = line.split(",")
        else:
            rows.append(line.split(","))
    return comments, header, rows
