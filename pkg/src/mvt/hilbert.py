"""Hilbert series of quotients by monomial ideals.

The series of S/I is computed by the short-exact-sequence recursion: writing
I = I' + (M) for a minimal generator M of degree s,

    HS(S/I) = HS(S/I') - t^s * HS(S/(I' : M)).

Numerators are integer coefficient lists over a denominator (1-t)^n; the
public representation is fully reduced so that N(1) is the degree whenever
the denominator exponent equals the Krull dimension.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable, Sequence

from .poly import UsageError, VarTable


# -- numerator polynomial helpers (dense integer coefficient lists) ------------

def _strip(a: list) -> tuple:
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def _add(a: Sequence[int], b: Sequence[int]) -> tuple:
    n = max(len(a), len(b))
    return _strip([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def _sub(a: Sequence[int], b: Sequence[int]) -> tuple:
    n = max(len(a), len(b))
    return _strip([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


def _shift(a: Sequence[int], s: int) -> tuple:
    if not a:
        return ()
    return tuple([0] * s + list(a))


def _mul(a: Sequence[int], b: Sequence[int]) -> tuple:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _strip(out)


def _div_one_minus_t(a: Sequence[int]) -> tuple:
    """Divide by (1 - t); requires a(1) == 0."""
    out = []
    acc = 0
    for i in range(len(a) - 1):
        acc += a[i]
        out.append(acc)
    return _strip(out)


@dataclass(frozen=True)
class HilbertSeries:
    """A series N(t) / (1-t)^s, stored fully reduced (N(1) != 0 unless N = 0)."""

    numerator: tuple
    denom_exp: int

    @staticmethod
    def make(numerator: Iterable[int], denom_exp: int) -> "HilbertSeries":
        numer = _strip(list(numerator))
        s = denom_exp
        while numer and s > 0 and sum(numer) == 0:
            numer = _div_one_minus_t(numer)
            s -= 1
        return HilbertSeries(numer, s)

    def degree(self) -> int:
        """N(1); the variety's degree when denom_exp is the Krull dimension."""
        return sum(self.numerator)

    def coefficients(self, upto: int) -> list:
        """Series expansion coefficients h_0..h_upto."""
        out = []
        for j in range(upto + 1):
            acc = 0
            for i, a in enumerate(self.numerator):
                if i > j:
                    break
                acc += a * comb(self.denom_exp - 1 + (j - i), j - i) if self.denom_exp > 0 else (a if i == j else 0)
            out.append(acc)
        return out

    def to_json(self) -> dict:
        return {"numerator": list(self.numerator), "denom_exp": self.denom_exp}

    def __str__(self) -> str:
        terms = []
        for i, a in enumerate(self.numerator):
            if a == 0:
                continue
            if i == 0:
                terms.append(str(a))
            else:
                terms.append(f"{a}t^{i}" if i > 1 else f"{a}t")
        numer = " + ".join(terms).replace("+ -", "- ") if terms else "0"
        return f"({numer})/(1-t)^{self.denom_exp}"


class MonomialIdeal:
    """A monomial ideal stored by its unique minimal generating set."""

    __slots__ = ("table", "gens")

    def __init__(self, table: VarTable, gens: Iterable[tuple]):
        width = len(table)
        cleaned = []
        for g in gens:
            g = tuple(int(e) for e in g)
            if len(g) != width:
                raise UsageError("generator exponent length does not match table")
            if any(e < 0 for e in g):
                raise UsageError("negative exponent in monomial generator")
            cleaned.append(g)
        self.table = table
        self.gens = tuple(sorted(minimalize(cleaned)))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MonomialIdeal)
            and self.table == other.table
            and self.gens == other.gens
        )

    def __hash__(self):
        return hash((self.table, self.gens))

    def gens_str(self) -> list:
        out = []
        for g in self.gens:
            out.append(
                " ".join(
                    n if e == 1 else f"{n}^{e}"
                    for n, e in zip(self.table.names, g)
                    if e
                )
                or "1"
            )
        return out

    def __repr__(self):
        return f"MonomialIdeal({', '.join(self.gens_str())})"


def _divides(a: tuple, b: tuple) -> bool:
    return all(x <= y for x, y in zip(a, b))


def minimalize(gens: Iterable[tuple]) -> list:
    """Drop every generator divisible by another one (and duplicates)."""
    uniq = sorted(set(gens), key=lambda g: (sum(g), g))
    out: list = []
    for g in uniq:
        if not any(_divides(h, g) for h in out):
            out.append(g)
    return out


def _canonical_key(gens: tuple) -> tuple:
    """Permutation-invariant key: drop unused variables, then alternately sort
    variable columns and generator rows.  Variable permutations leave the
    Hilbert numerator unchanged, so any such key is safe for memoization."""
    if not gens:
        return ()
    used = [j for j in range(len(gens[0])) if any(g[j] for g in gens)]
    rows = [tuple(g[j] for j in used) for g in gens]
    for _ in range(2):
        cols = sorted(range(len(used)), key=lambda j: tuple(r[j] for r in sorted(rows)))
        rows = [tuple(r[j] for j in cols) for r in rows]
        used = list(range(len(cols)))
        rows = sorted(rows)
    return tuple(rows)


def _pick_pivot(gens: tuple) -> tuple:
    # prefer generators with high single exponents (mixed powers collapse
    # their colon ideals fastest), then high degree
    return max(gens, key=lambda g: (max(g), sum(g), g))


def _numerator(gens: tuple, memo: dict) -> tuple:
    """Numerator of HS(S/I)*(1-t)^n for I given by minimal generators.

    The value does not depend on the ambient variable count n.
    """
    if not gens:
        return (1,)
    if any(sum(g) == 0 for g in gens):
        return ()  # unit ideal, zero quotient
    key = _canonical_key(gens)
    cached = memo.get(key)
    if cached is not None:
        return cached

    supports = [frozenset(j for j, e in enumerate(g) if e) for g in gens]
    disjoint = True
    seen: set = set()
    for s in supports:
        if seen & s:
            disjoint = False
            break
        seen |= s
    if disjoint:
        numer = (1,)
        for g in gens:
            factor = [1] + [0] * (sum(g) - 1) + [-1]
            numer = _mul(numer, factor)
    else:
        pivot = _pick_pivot(gens)
        rest = tuple(g for g in gens if g != pivot)
        colon = tuple(minimalize(tuple(max(e - p, 0) for e, p in zip(g, pivot)) for g in rest))
        numer = _sub(_numerator(rest, memo), _shift(_numerator(colon, memo), sum(pivot)))
    memo[key] = numer
    return numer


def monomial_hilbert(ideal: MonomialIdeal, ambient_vars: int | None = None) -> HilbertSeries:
    """Hilbert series of S/I for a monomial ideal I, reduced."""
    n = len(ideal.table) if ambient_vars is None else ambient_vars
    numer = _numerator(ideal.gens, {})
    return HilbertSeries.make(numer, n)
