"""Fixed-layout MPS export.

Row and column names are short unique codes (fixed MPS allows 8 characters);
the full provenance label of each is written as a ``*`` comment line so the
file stays readable and re-importable.
"""
from __future__ import annotations

from .model import EQ, LPProblem

_OBJ = "COST"


def _num(v: float) -> str:
    """Most precise representation that fits the 12-character field."""
    if v == int(v) and abs(v) < 1e11:
        return str(int(v))
    for digits in range(17, 0, -1):
        s = f"{v:.{digits}g}"
        if len(s) <= 12:
            return s
    raise ValueError(f"cannot fit {v!r} in an MPS field")


def _line(code: str, name1: str, name2: str = "", value: str = "") -> str:
    # fields start at columns 2, 5, 15, 25 (1-based)
    out = f" {code:<2} {name1:<8}"
    if name2:
        out += f"  {name2:<8}  {value:>12}"
    return out.rstrip()


def row_name(i: int) -> str:
    return f"R{i:07d}"


def col_name(j: int) -> str:
    return f"C{j:07d}"


def export_lp(p: LPProblem, name: str = "WITNESS") -> str:
    lines = [f"NAME          {name[:8]}"]
    for j, label in enumerate(p.col_labels):
        lines.append(f"* {col_name(j)} {label}")
    for i, r in enumerate(p.rows):
        if r.name:
            lines.append(f"* {row_name(i)} {r.name}")
    lines.append("ROWS")
    lines.append(_line("N", _OBJ))
    for i, r in enumerate(p.rows):
        lines.append(_line("E" if r.relation == EQ else "G", row_name(i)))
    cols: list[list[tuple[str, float]]] = [[] for _ in range(p.n_vars)]
    for j, v in sorted(p.objective.items()):
        if v != 0:
            cols[j].append((_OBJ, v))
    for i, r in enumerate(p.rows):
        for j, v in zip(r.indices, r.values):
            if v != 0:
                cols[j].append((row_name(i), v))
    lines.append("COLUMNS")
    for j, entries in enumerate(cols):
        if not entries:
            # keep empty columns visible to the reader with a zero objective entry
            entries = [(_OBJ, 0.0)]
        for rn, v in entries:
            lines.append(_line("", col_name(j), rn, _num(v)))
    lines.append("RHS")
    for i, r in enumerate(p.rows):
        if r.rhs != 0:
            lines.append(_line("", "RHS", row_name(i), _num(r.rhs)))
    lines.append("BOUNDS")
    for j, lo in enumerate(p.lower):
        if lo != 0:
            lines.append(_line("LO", "BND", col_name(j), _num(lo)))
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"
