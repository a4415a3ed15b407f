"""CSV helpers and cell markers shared by the benchmarks."""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path

VALID = "✓"
INVALID_MARK = "✗"
NA = "n/a"
INF = "∞"


def fmt(v, digits: int = 6) -> str:
    if v is None:
        return NA
    if isinstance(v, bool):
        return VALID if v else INVALID_MARK
    if isinstance(v, float):
        if math.isinf(v):
            return INF
        return f"{v:.{digits}f}"
    return str(v)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(r[h]) if not isinstance(r[h], str) else r[h] for h in header])
    return buf.getvalue()


def write(text: str, path) -> None:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text, encoding="utf-8")
