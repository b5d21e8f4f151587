"""Exact sparse multivariate polynomials over the rationals.

A polynomial is a dictionary mapping exponent tuples to coefficients.  The
coefficient type is fractions.Fraction for all exact work, which makes
polynomial identity testing fully reliable; the homotopy layer reuses the
same class with complex coefficients.

  terms = {(2, 1, 0): Fraction(3), (0, 0, 4): Fraction(-1, 2)}

with a VarTable ("m0", "m1", "m2") reads as 3*m0^2*m1 - 1/2*m2^4.  The zero
polynomial has an empty term map; canonical form never stores a zero
coefficient.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping


class UsageError(ValueError):
    """An operation was called outside its documented contract."""


class OrderValidationError(UsageError):
    """A term order failed the per-minor antidiagonal leading-term check."""

    def __init__(self, columns, message):
        super().__init__(message)
        self.columns = tuple(columns)


def _coerce(value):
    if isinstance(value, Fraction) or isinstance(value, complex):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return complex(value)
    raise UsageError(f"unsupported coefficient type {type(value).__name__}")


class VarTable:
    """Ordered table of distinct variable names shared by a family of polynomials.

    The position of a name is stable for the table's lifetime and doubles as
    the significance rank used by monomial orders (earlier = more significant
    under the default order).
    """

    __slots__ = ("names", "_index")

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise UsageError(f"duplicate variable names in {names!r}")
        self.names = names
        self._index = {name: i for i, name in enumerate(names)}

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UsageError(f"unknown variable {name!r}") from None

    def __len__(self) -> int:
        return len(self.names)

    def __eq__(self, other) -> bool:
        return isinstance(other, VarTable) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"VarTable({', '.join(self.names)})"

    def zero(self) -> "MultiPoly":
        return MultiPoly(self, {})

    def const(self, value) -> "MultiPoly":
        value = _coerce(value)
        if value == 0:
            return self.zero()
        return MultiPoly(self, {(0,) * len(self.names): value})

    def variable(self, name: str) -> "MultiPoly":
        exp = [0] * len(self.names)
        exp[self.index(name)] = 1
        return MultiPoly(self, {tuple(exp): Fraction(1)})

    def monomial(self, coeff, exps: Mapping[str, int]) -> "MultiPoly":
        coeff = _coerce(coeff)
        if coeff == 0:
            return self.zero()
        vec = [0] * len(self.names)
        for name, e in exps.items():
            vec[self.index(name)] = int(e)
        return MultiPoly(self, {tuple(vec): coeff})


class MonomialOrder:
    """Graded order with a configurable significance permutation and
    reverse-lexicographic tie-break.

    ``permutation`` lists variable indices from most to least significant;
    the default is the table order.  ``key`` returns a sort key that is
    ascending in the order, so the leading monomial is the maximum.
    """

    __slots__ = ("table", "permutation", "_rev")

    def __init__(self, table: VarTable, permutation: Iterable[int] | None = None):
        self.table = table
        if permutation is None:
            permutation = tuple(range(len(table)))
        else:
            permutation = tuple(permutation)
            if sorted(permutation) != list(range(len(table))):
                raise UsageError("permutation must reorder all variable indices")
        self.permutation = permutation
        self._rev = tuple(reversed(permutation))

    def key(self, mono: tuple) -> tuple:
        # grevlex: higher degree wins, ties broken so that the monomial whose
        # least-significant exponent excess comes later is larger
        return (sum(mono), tuple(-mono[p] for p in self._rev))

    def leading(self, poly: "MultiPoly") -> tuple:
        """Return (monomial, coefficient) of the leading term."""
        if not poly.terms:
            raise UsageError("zero polynomial has no leading term")
        mono = max(poly.terms, key=self.key)
        return mono, poly.terms[mono]

    def sorted_terms(self, poly: "MultiPoly") -> list:
        return sorted(poly.terms.items(), key=lambda kv: self.key(kv[0]))


class MultiPoly:
    """Sparse multivariate polynomial over a shared VarTable."""

    __slots__ = ("table", "terms")

    def __init__(self, table: VarTable, terms: Mapping[tuple, object]):
        self.table = table
        self.terms = {m: c for m, c in terms.items() if c != 0}

    # -- construction helpers -------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(m) for m in self.terms)

    def _check_table(self, other: "MultiPoly"):
        if self.table != other.table:
            raise UsageError("polynomials use different variable tables")

    def _as_poly(self, other):
        if isinstance(other, MultiPoly):
            self._check_table(other)
            return other
        return self.table.const(other)

    # -- ring operations -------------------------------------------------------

    def __add__(self, other):
        other = self._as_poly(other)
        out = dict(self.terms)
        for mono, coeff in other.terms.items():
            acc = out.get(mono, 0) + coeff
            if acc == 0:
                out.pop(mono, None)
            else:
                out[mono] = acc
        return MultiPoly(self.table, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.table, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._as_poly(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            coeff = _coerce(other)
            if coeff == 0:
                return self.table.zero()
            return MultiPoly(self.table, {m: c * coeff for m, c in self.terms.items()})
        self._check_table(other)
        out: dict = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                mono = tuple(x + y for x, y in zip(ma, mb))
                acc = out.get(mono, 0) + ca * cb
                if acc == 0:
                    out.pop(mono, None)
                else:
                    out[mono] = acc
        return MultiPoly(self.table, out)

    __rmul__ = __mul__

    def __pow__(self, power: int):
        if not isinstance(power, int) or power < 0:
            raise UsageError("polynomial powers must be non-negative integers")
        result = self.table.const(1)
        base = self
        while power:
            if power & 1:
                result = result * base
            base = base * base if power > 1 else base
            power >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self.table == other.table and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == self.table.const(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.table, frozenset(self.terms.items())))

    # -- calculus and evaluation ------------------------------------------------

    def diff(self, name: str) -> "MultiPoly":
        """Formal partial derivative with respect to one variable."""
        idx = self.table.index(name)
        out: dict = {}
        for mono, coeff in self.terms.items():
            e = mono[idx]
            if e == 0:
                continue
            lowered = mono[:idx] + (e - 1,) + mono[idx + 1:]
            acc = out.get(lowered, 0) + e * coeff
            if acc == 0:
                out.pop(lowered, None)
            else:
                out[lowered] = acc
        return MultiPoly(self.table, out)

    def eval(self, values: Mapping[str, object]):
        """Evaluate at a point; every variable that occurs must be assigned."""
        idx_val = {}
        for name, v in values.items():
            idx_val[self.table.index(name)] = v
        powers: dict = {}

        def var_power(i, e):
            cache = powers.setdefault(i, {})
            if e not in cache:
                cache[e] = idx_val[i] ** e
            return cache[e]

        total = 0
        for mono, coeff in self.terms.items():
            term = coeff
            for i, e in enumerate(mono):
                if e == 0:
                    continue
                if i not in idx_val:
                    raise UsageError(
                        f"no value supplied for variable {self.table.names[i]!r}"
                    )
                term = term * var_power(i, e)
            total = total + term
        return total

    def compose(self, mapping: Mapping[str, "MultiPoly"], table: VarTable) -> "MultiPoly":
        """Substitute polynomials (over ``table``) for every occurring variable."""
        images = {}
        for name, image in mapping.items():
            if image.table != table:
                raise UsageError("substitution images use a different table")
            images[self.table.index(name)] = image
        power_cache: dict = {}

        def image_power(i, e):
            cache = power_cache.setdefault(i, [table.const(1), images[i]])
            while len(cache) <= e:
                cache.append(cache[-1] * images[i])
            return cache[e]

        total = table.zero()
        for mono, coeff in self.terms.items():
            term = table.const(coeff)
            for i, e in enumerate(mono):
                if e == 0:
                    continue
                if i not in images:
                    raise UsageError(
                        f"no substitution supplied for {self.table.names[i]!r}"
                    )
                term = term * image_power(i, e)
            total = total + term
        return total

    def rename(self, mapping: Mapping[str, str], table: VarTable) -> "MultiPoly":
        """Transport the polynomial to ``table`` along a variable renaming."""
        loc = {}
        for name, target in mapping.items():
            loc[self.table.index(name)] = table.index(target)
        out: dict = {}
        width = len(table)
        for mono, coeff in self.terms.items():
            vec = [0] * width
            for i, e in enumerate(mono):
                if e == 0:
                    continue
                if i not in loc:
                    raise UsageError(f"no renaming for {self.table.names[i]!r}")
                vec[loc[i]] = e
            out[tuple(vec)] = coeff
        return MultiPoly(table, out)

    # -- display -----------------------------------------------------------------

    def to_str(self, order: MonomialOrder | None = None) -> str:
        """Canonical text form: terms ascending in the active monomial order,
        coefficients printed exactly (``p/q``), e.g.
        ``-1 m0^2 m1 m3 + 3 m0^2 m2^2 - 3 m0 m1^2 m2 + 1 m1^4``."""
        if not self.terms:
            return "0"
        if order is None:
            order = MonomialOrder(self.table)
        pieces = []
        for i, (mono, coeff) in enumerate(order.sorted_terms(self)):
            mono_s = " ".join(
                name if e == 1 else f"{name}^{e}"
                for name, e in zip(self.table.names, mono)
                if e
            )
            if i == 0:
                head = str(coeff)
            elif coeff > 0:
                head = f" + {coeff}"
            else:
                head = f" - {-coeff}"
            pieces.append(head + (f" {mono_s}" if mono_s else ""))
        return "".join(pieces)

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"MultiPoly({self.to_str()})"
