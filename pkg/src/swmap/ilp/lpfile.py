"""CPLEX-style LP text files: writer plus a small reader for round-trip checks."""

from __future__ import annotations

import re
from pathlib import Path

from .build import IlpModel

MAX_LINE = 250
_SENSES = {"<=": "<=", "=": "=", ">=": ">="}


def _num(v: float) -> str:
    v = float(v)
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _expr(terms, names) -> list[str]:
    """Linear expression tokens, e.g. ``['3 x_1', '- 2 x_4']``."""
    out = []
    for n, (k, c) in enumerate(terms):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        coef = "" if mag == 1 else _num(mag) + " "
        tok = f"{coef}{names[k]}"
        if n == 0:
            out.append(("-" if c < 0 else "") + tok)
        else:
            out.append(f"{sign} {tok}")
    return out


def _wrap(head: str, tokens: list[str], tail: str = "") -> list[str]:
    lines = []
    line = head
    for tok in tokens + ([tail] if tail else []):
        if len(line) + 1 + len(tok) > MAX_LINE and line.strip():
            lines.append(line)
            line = "   " + tok
        else:
            line = f"{line} {tok}" if line else tok
    lines.append(line)
    return lines


def to_lp(model: IlpModel) -> str:
    names = [v.name for v in model.variables]
    lines = [f"\\ swmap mapping ILP: {model.n_vars} binaries, {model.n_rows} rows", "Minimize"]
    obj_terms = [(k, c) for k, c in enumerate(model.objective) if c]
    if obj_terms:
        tokens = _expr(obj_terms, names)
    else:
        tokens = [f"0 {names[0]}"] if names else []
    lines += _wrap(" obj:", tokens)
    lines.append("Subject To")
    for con in model.constraints:
        if con.terms:
            tokens = _expr(con.terms, names)
        else:
            tokens = [f"0 {names[0]}"] if names else ["0"]
        lines += _wrap(f" {con.name}:", tokens, f"{_SENSES[con.sense]} {_num(con.rhs)}")
    lines.append("Binary")
    for n in names:
        lines.append(f" {n}")
    lines.append("End")
    return "\n".join(lines) + "\n"


def export_lp(model: IlpModel, path) -> None:
    Path(path).write_text(to_lp(model))


_TERM = re.compile(r"([+-]?)\s*([0-9.eE+-]*)\s*([A-Za-z_][\w.]*)")


def _parse_expr(text: str) -> dict[str, float]:
    out: dict[str, float] = {}
    text = text.strip()
    pos = 0
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m:
            raise ValueError(f"cannot parse LP expression near {text[pos:pos + 30]!r}")
        sign, coef, name = m.groups()
        c = float(coef) if coef not in ("", "+", "-") else 1.0
        if sign == "-":
            c = -c
        out[name] = out.get(name, 0.0) + c
        pos = m.end()
        while pos < len(text) and text[pos] == " ":
            pos += 1
    return out


def parse_lp(text: str) -> dict:
    """Parse a file written by :func:`to_lp` into objective, rows and binaries."""
    section = None
    stmts: dict[str, list[str]] = {"obj": [], "rows": [], "bin": []}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        low = line.lower()
        if low in ("minimize", "maximize"):
            section = "obj"
            continue
        if low == "subject to":
            section = "rows"
            continue
        if low == "binary":
            section = "bin"
            continue
        if low == "end":
            break
        if section == "bin":
            stmts["bin"].extend(line.split())
        elif section in ("obj", "rows"):
            if ":" not in line and stmts[section]:
                stmts[section][-1] += " " + line
            else:
                stmts[section].append(line)
    obj_name, _, obj_expr = stmts["obj"][0].partition(":") if stmts["obj"] else ("obj", "", "")
    rows = []
    for stmt in stmts["rows"]:
        name, _, body = stmt.partition(":")
        m = re.search(r"(<=|>=|=)\s*(\S+)\s*$", body)
        if not m:
            raise ValueError(f"row {name!r} has no sense")
        rows.append({"name": name.strip(), "terms": _parse_expr(body[:m.start()]), "sense": m.group(1),
                     "rhs": float(m.group(2))})
    return {"objective": _parse_expr(obj_expr), "rows": rows, "binaries": stmts["bin"]}
