"""Exact linear algebra over Q: sparse Gauss-Jordan elimination."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DimensionMismatch


class QMatrix:
    """A rows x cols matrix over Q stored as a list of sparse rows."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data=None):
        self.rows = rows
        self.cols = cols
        self.data = [dict() for _ in range(rows)] if data is None else data
        if len(self.data) != rows:
            raise DimensionMismatch(f"expected {rows} rows, got {len(self.data)}")

    @classmethod
    def from_dense(cls, rows):
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        data = []
        for r in rows:
            if len(r) != ncols:
                raise DimensionMismatch("ragged matrix")
            data.append({j: Fraction(x) for j, x in enumerate(r) if x})
        return cls(len(rows), ncols, data)

    @classmethod
    def identity(cls, n):
        return cls(n, n, [{i: Fraction(1)} for i in range(n)])

    def __setitem__(self, key, value):
        i, j = key
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise DimensionMismatch(f"index {key} out of range for {self.rows}x{self.cols}")
        value = Fraction(value)
        if value:
            self.data[i][j] = value
        else:
            self.data[i].pop(j, None)

    def __getitem__(self, key):
        i, j = key
        return self.data[i].get(j, Fraction(0))

    def to_dense(self):
        return [[self.data[i].get(j, Fraction(0)) for j in range(self.cols)] for i in range(self.rows)]

    def matvec(self, v):
        if len(v) != self.cols:
            raise DimensionMismatch(f"vector of length {len(v)} for {self.cols} columns")
        return [sum((c * v[j] for j, c in row.items()), Fraction(0)) for row in self.data]

    def __repr__(self):
        return f"QMatrix({self.rows}x{self.cols})"


@dataclass
class QSolution:
    rank: int
    particular: list  # one entry per rhs column: a solution vector or None (NoSolution)
    kernel: list = field(default_factory=list)

    @property
    def solvable(self):
        return all(p is not None for p in self.particular)


def _rref(m: QMatrix, rhs_cols):
    """Gauss-Jordan on [M | rhs]; returns (pivot rows keyed by pivot col, leftover rows)."""
    ncols = m.cols
    rows = [dict(r) for r in m.data]
    for k, col in enumerate(rhs_cols):
        for i, x in enumerate(col):
            x = Fraction(x)
            if x:
                rows[i][ncols + k] = x
    rows = [r for r in rows if r]
    pivots = {}
    remaining = rows
    for c in range(ncols):
        best = None
        for idx, r in enumerate(remaining):
            if c in r and (best is None or len(r) < len(remaining[best])):
                best = idx
        if best is None:
            continue
        prow = remaining.pop(best)
        inv = 1 / prow[c]
        prow = {j: x * inv for j, x in prow.items()}
        for r in remaining:
            f = r.get(c)
            if f:
                for j, x in prow.items():
                    v = r.get(j, 0) - f * x
                    if v:
                        r[j] = v
                    else:
                        r.pop(j, None)
        remaining = [r for r in remaining if r]
        pivots[c] = prow
    # back substitution to reduced form
    order = sorted(pivots)
    for c in reversed(order):
        prow = pivots[c]
        for c2 in order:
            if c2 >= c:
                break
            r = pivots[c2]
            f = r.get(c)
            if f:
                for j, x in prow.items():
                    v = r.get(j, 0) - f * x
                    if v:
                        r[j] = v
                    else:
                        r.pop(j, None)
    return pivots, remaining


def qsolve(m: QMatrix, rhs=()) -> QSolution:
    """Solve M x = b exactly for each column b in ``rhs``.

    Returns the rank, a particular solution per column (None when the column
    is inconsistent) and a basis of the kernel of M.
    """
    rhs = [list(col) for col in rhs]
    for col in rhs:
        if len(col) != m.rows:
            raise DimensionMismatch(f"rhs of length {len(col)} for {m.rows} rows")
    n = m.cols
    pivots, leftover = _rref(m, rhs)
    particular = []
    for k in range(len(rhs)):
        key = n + k
        if any(key in r for r in leftover):
            particular.append(None)
            continue
        x = [Fraction(0)] * n
        for c, prow in pivots.items():
            x[c] = prow.get(key, Fraction(0))
        particular.append(x)
    free = [c for c in range(n) if c not in pivots]
    kernel = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for c, prow in pivots.items():
            a = prow.get(fc)
            if a:
                v[c] = -a
        kernel.append(v)
    return QSolution(rank=len(pivots), particular=particular, kernel=kernel)


def rank(m: QMatrix) -> int:
    return qsolve(m).rank
