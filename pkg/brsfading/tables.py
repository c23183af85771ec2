"""CSV curve tables written by the command line interface

A table starts with ``#``-prefixed ``key = value`` header lines recording the
parameters, the seed and the package version, followed by a column line and one row
per x value, sorted by x.
"""
import csv
import io
import math
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

from ._version import __version__

COLUMNS = ("x", "y", "y_mc", "y_mc_se")


@dataclass(frozen=True)
class CurveRow:
    x: float
    y: float
    y_mc: float = None
    y_mc_se: float = None


@dataclass
class CurveTable:
    header: dict
    rows: list = field(default_factory=list)

    def __post_init__(self):
        self.header = dict(self.header)
        self.header.setdefault("version", __version__)
        self.rows = sorted(self.rows, key=lambda row: row.x)

    @classmethod
    def for_params(cls, params, seed=None, rows=(), **extra):
        """Table whose header records every field of ``params`` and the seed"""
        header = dict(params.to_dict())
        header["seed"] = seed
        header.update(extra)
        return cls(header, list(rows))

    @property
    def x(self):
        return [row.x for row in self.rows]

    @property
    def y(self):
        return [row.y for row in self.rows]

    @property
    def has_mc(self):
        return any(row.y_mc is not None for row in self.rows)

    def write_csv(self, target):
        """Write to a path or an open text file"""
        with _opened(target) as f:
            _write_header(f, self.header)
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(COLUMNS)
            for row in self.rows:
                writer.writerow(
                    [_format(getattr(row, column)) for column in COLUMNS]
                )

    def to_csv_string(self):
        buffer = io.StringIO()
        self.write_csv(buffer)
        return buffer.getvalue()


def read_csv(source):
    """Read a table written by :meth:`CurveTable.write_csv`"""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as f:
            return read_csv(f)
    header = {}
    lines = []
    for line in source:
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            header[key.strip()] = _parse_value(value.strip())
        elif line.strip():
            lines.append(line)
    reader = csv.reader(lines)
    columns = next(reader)
    if tuple(columns) != COLUMNS:
        raise ValueError(f"unexpected columns {columns}, expected {COLUMNS}")
    rows = [CurveRow(*(_parse_cell(cell) for cell in record)) for record in reader]
    return CurveTable(header, rows)


def write_wide_csv(tables, target, *, x_name="x", header=None):
    """Write several curves sharing their x values, one column per label

    Parameters
    ----------
    tables : dict
        label -> CurveTable; MC columns ``<label>_mc`` and ``<label>_mc_se`` are
        added for tables that carry them
    """
    labels = list(tables)
    xs = tables[labels[0]].x
    for label in labels:
        if tables[label].x != xs:
            raise ValueError(f"curve {label} has different x values")
    columns = [x_name]
    for label in labels:
        columns.append(label)
        if tables[label].has_mc:
            columns += [f"{label}_mc", f"{label}_mc_se"]

    with _opened(target) as f:
        merged = {"version": __version__}
        merged.update(header or {})
        _write_header(f, merged)
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for i, x in enumerate(xs):
            record = [_format(x)]
            for label in labels:
                row = tables[label].rows[i]
                record.append(_format(row.y))
                if tables[label].has_mc:
                    record += [_format(row.y_mc), _format(row.y_mc_se)]
            writer.writerow(record)


def write_summary_csv(rows, target, *, header=None):
    """Write (quantity, analytic, mc, mc_se) rows"""
    with _opened(target) as f:
        merged = {"version": __version__}
        merged.update(header or {})
        _write_header(f, merged)
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(("quantity", "analytic", "mc", "mc_se"))
        for name, *values in rows:
            writer.writerow([name] + [_format(v) for v in values])


@contextmanager
def _opened(target):
    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8", newline="") as f:
            yield f
    else:
        yield target


def _write_header(f, header):
    for key, value in header.items():
        f.write(f"# {key} = {'' if value is None else value}\n")


def _format(value):
    if value is None:
        return ""
    return repr(float(value))


def _parse_cell(cell):
    return None if cell == "" else float(cell)


def _parse_value(text):
    if text == "":
        return None
    try:
        number = float(text)
    except ValueError:
        return text
    if math.isfinite(number) and number.is_integer() and not set(".e") & set(text):
        return int(number)
    return number
