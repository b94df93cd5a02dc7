"""Rectangular CSV tables with complex values split into re_/im_ columns."""
from __future__ import annotations

import csv
import io
import math
import sys
from dataclasses import dataclass, field
from numbers import Integral
from pathlib import Path

import numpy as np


def format_value(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, Integral):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def split_complex(prefix: str, value: complex) -> dict:
    value = complex(value)
    return {f"re_{prefix}": value.real, f"im_{prefix}": value.imag}


@dataclass
class CsvTable:
    header: list[str]
    rows: list[list] = field(default_factory=list)

    def add(self, record: dict) -> None:
        missing = set(self.header) - set(record)
        extra = set(record) - set(self.header)
        if missing or extra:
            raise KeyError(f"row columns differ from header: missing={sorted(missing)} "
                           f"extra={sorted(extra)}")
        self.rows.append([record[h] for h in self.header])

    def column(self, name: str) -> list:
        i = self.header.index(name)
        return [r[i] for r in self.rows]

    def records(self) -> list[dict]:
        return [dict(zip(self.header, r)) for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for r in self.rows:
            w.writerow([format_value(x) for x in r])
        return buf.getvalue()

    def write(self, path: str | Path | None) -> None:
        text = self.to_csv()
        if path is None or str(path) == "-":
            sys.stdout.write(text)
        else:
            Path(path).write_text(text, encoding="utf-8")


def read_csv(path: str | Path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))
