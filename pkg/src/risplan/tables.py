"""Column tables and the plain-text output formats (CSV, PGM)."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np


def fmt(value) -> str:
    """Six significant digits, the precision used in every data file."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.6g}"


@dataclass
class Table:
    columns: list[str]
    rows: np.ndarray  # shape (n_rows, n_columns)

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=float).reshape(-1, len(self.columns))

    def __len__(self):
        return self.rows.shape[0]

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.columns.index(name)]

    def to_csv(self, path=None, int_columns=()) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        ints = {self.columns.index(c) for c in int_columns if c in self.columns}
        for row in self.rows:
            w.writerow([str(int(v)) if j in ints else fmt(v) for j, v in enumerate(row)])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def write_pgm(path, image: np.ndarray, comments=()) -> None:
    """Write an ASCII (P2) graymap; ``image`` rows are written top to bottom."""
    image = np.asarray(image, dtype=int)
    h, w = image.shape
    lines = ["P2"]
    lines += [f"# {c}" for c in comments]
    lines.append(f"{w} {h}")
    lines.append("255")
    lines += [" ".join(str(int(v)) for v in row) for row in image]
    Path(path).write_text("\n".join(lines) + "\n")


def read_pgm(path) -> np.ndarray:
    """Minimal P2 reader (comments allowed anywhere between tokens)."""
    tokens = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0]
        tokens += line.split()
    if not tokens or tokens[0] != "P2":
        raise ValueError("not a P2 graymap")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    data = np.array([int(t) for t in tokens[4:]], dtype=int)
    if data.size != w * h or data.min(initial=0) < 0 or data.max(initial=0) > maxval:
        raise ValueError("P2 pixel data does not match header")
    return data.reshape(h, w)
