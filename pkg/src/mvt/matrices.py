"""Polynomial matrices: determinants, maximal minors, exact rational rank.

Determinants use cofactor expansion along the sparsest row or column, which
suits the structured 2x2 and 3x3 blocks that arise from the moment matrices.
Rank of constant (rational) matrices uses fraction-free Bareiss elimination,
so no tolerance is ever involved.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd
from typing import Callable, Sequence

from .poly import MultiPoly, UsageError, VarTable


class PolyMatrix:
    """Rectangular matrix of MultiPoly entries over one shared VarTable."""

    __slots__ = ("table", "rows", "cols", "entries")

    def __init__(self, table: VarTable, rows: int, cols: int, entries: Sequence[MultiPoly]):
        if rows <= 0 or cols <= 0:
            raise UsageError("matrix dimensions must be positive")
        entries = tuple(entries)
        if len(entries) != rows * cols:
            raise UsageError(f"expected {rows * cols} entries, got {len(entries)}")
        for e in entries:
            if e.table != table:
                raise UsageError("matrix entries use different variable tables")
        self.table = table
        self.rows = rows
        self.cols = cols
        self.entries = entries

    @classmethod
    def from_rows(cls, table: VarTable, row_lists: Sequence[Sequence[MultiPoly]]) -> "PolyMatrix":
        rows = len(row_lists)
        cols = len(row_lists[0])
        flat = []
        for row in row_lists:
            if len(row) != cols:
                raise UsageError("ragged rows")
            flat.extend(row)
        return cls(table, rows, cols, flat)

    def entry(self, i: int, j: int) -> MultiPoly:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> list:
        return [self.entry(i, j) for j in range(self.cols)]

    def column(self, j: int) -> list:
        return [self.entry(i, j) for i in range(self.rows)]

    def transpose(self) -> "PolyMatrix":
        flat = [self.entry(i, j) for j in range(self.cols) for i in range(self.rows)]
        return PolyMatrix(self.table, self.cols, self.rows, flat)

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "PolyMatrix":
        flat = [self.entry(i, j) for i in row_idx for j in col_idx]
        return PolyMatrix(self.table, len(row_idx), len(col_idx), flat)

    def map_entries(self, fn: Callable[[MultiPoly], MultiPoly], table: VarTable | None = None) -> "PolyMatrix":
        table = table if table is not None else self.table
        return PolyMatrix(table, self.rows, self.cols, [fn(e) for e in self.entries])

    def evaluate(self, values) -> list:
        """Evaluate every entry, returning a list-of-rows of scalars."""
        return [[self.entry(i, j).eval(values) for j in range(self.cols)] for i in range(self.rows)]

    def det(self) -> MultiPoly:
        """Exact determinant by cofactor expansion along the sparsest line."""
        if self.rows != self.cols:
            raise UsageError("determinant requires a square matrix")
        return _det_cofactor(self, tuple(range(self.rows)), tuple(range(self.cols)))

    def maximal_minors(self) -> list:
        """All row-count-sized minors as (1-based column index set, MultiPoly),
        in lexicographic order of the index sets."""
        if self.rows > self.cols:
            raise UsageError("maximal minors require rows <= cols")
        row_idx = tuple(range(self.rows))
        out = []
        for cols in itertools.combinations(range(self.cols), self.rows):
            minor = _det_cofactor(self, row_idx, cols)
            out.append((tuple(c + 1 for c in cols), minor))
        return out

    def __repr__(self) -> str:
        lines = [" | ".join(str(self.entry(i, j)) for j in range(self.cols)) for i in range(self.rows)]
        return "PolyMatrix[\n  " + "\n  ".join(lines) + "\n]"


def _det_cofactor(m: PolyMatrix, rows: tuple, cols: tuple) -> MultiPoly:
    n = len(rows)
    e = m.entry
    if n == 1:
        return e(rows[0], cols[0])
    if n == 2:
        return e(rows[0], cols[0]) * e(rows[1], cols[1]) - e(rows[0], cols[1]) * e(rows[1], cols[0])

    # pick the line (row or column) with the most zero entries
    best = None  # (zeros, is_row, position)
    for ri, r in enumerate(rows):
        zeros = sum(1 for c in cols if e(r, c).is_zero)
        if best is None or zeros > best[0]:
            best = (zeros, True, ri)
    for ci, c in enumerate(cols):
        zeros = sum(1 for r in rows if e(r, c).is_zero)
        if zeros > best[0]:
            best = (zeros, False, ci)

    total = m.table.zero()
    _, is_row, pos = best
    if is_row:
        r = rows[pos]
        sub_rows = rows[:pos] + rows[pos + 1:]
        for ci, c in enumerate(cols):
            entry = e(r, c)
            if entry.is_zero:
                continue
            sub = _det_cofactor(m, sub_rows, cols[:ci] + cols[ci + 1:])
            term = entry * sub
            total = total + term if (pos + ci) % 2 == 0 else total - term
    else:
        c = cols[pos]
        sub_cols = cols[:pos] + cols[pos + 1:]
        for ri, r in enumerate(rows):
            entry = e(r, c)
            if entry.is_zero:
                continue
            sub = _det_cofactor(m, rows[:ri] + rows[ri + 1:], sub_cols)
            term = entry * sub
            total = total + term if (pos + ri) % 2 == 0 else total - term
    return total


def det_permutation_sum(rows: Sequence[Sequence]) -> object:
    """Sum-over-permutations determinant of a constant matrix (test oracle)."""
    n = len(rows)
    total = 0
    for perm in itertools.permutations(range(n)):
        sign = 1
        seen = list(perm)
        for i in range(n):
            while seen[i] != i:
                j = seen[i]
                seen[i], seen[j] = seen[j], seen[i]
                sign = -sign
        prod = sign
        for i in range(n):
            prod = prod * rows[i][perm[i]]
        total = total + prod
    return total


def rank_exact(rows: Sequence[Sequence]) -> int:
    """Rank of a rational matrix by fraction-free (Bareiss) elimination.

    Entries may be ints or Fractions; each row is scaled to integers first
    (which leaves the rank unchanged), then eliminated with exact integer
    divisions only.
    """
    m = len(rows)
    if m == 0:
        return 0
    n = len(rows[0])
    a: list[list[int]] = []
    for row in rows:
        if len(row) != n:
            raise UsageError("ragged rows")
        fracs = [Fraction(x) for x in row]
        scale = 1
        for f in fracs:
            scale = scale * f.denominator // gcd(scale, f.denominator)
        a.append([int(f * scale) for f in fracs])

    rank = 0
    pivot_row = 0
    prev = 1
    for col in range(n):
        pivot = None
        for i in range(pivot_row, m):
            if a[i][col] != 0:
                if pivot is None or abs(a[i][col]) < abs(a[pivot][col]):
                    pivot = i
        if pivot is None:
            continue
        a[pivot_row], a[pivot] = a[pivot], a[pivot_row]
        p = a[pivot_row][col]
        for i in range(pivot_row + 1, m):
            head = a[i][col]
            for j in range(col + 1, n):
                num = p * a[i][j] - head * a[pivot_row][j]
                q, r = divmod(num, prev)
                assert r == 0, "Bareiss division not exact"
                a[i][j] = q
            a[i][col] = 0
        prev = p
        pivot_row += 1
        rank += 1
        if pivot_row == m:
            break
    return rank
