"""Determinantal matrices of the moment varieties and their exact checks.

For each distribution family this module builds the structured matrix whose
maximal minors generate the variety's ideal, enumerates those generators,
verifies the defining kernel / vanishing identities symbolically, produces
degrees and Hilbert series (closed form and independently through the
monomial-ideal recursion), probes singular strata by exact Jacobian rank, and
tests secant nondefectiveness for mixtures.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Sequence

from . import moments as mo
from .hilbert import HilbertSeries, MonomialIdeal, monomial_hilbert
from .matrices import PolyMatrix, rank_exact
from .poly import MonomialOrder, OrderValidationError, UsageError, VarTable


class Family(str, enum.Enum):
    IG = "ig"
    GAMMA = "gamma"
    GAUSSIAN = "gaussian"
    EXP = "exp"
    CHI2 = "chi2"
    CUM_IG = "cum-ig"
    CUM_GAMMA = "cum-gamma"


MOMENT_FAMILIES = (Family.IG, Family.GAMMA, Family.GAUSSIAN, Family.EXP, Family.CHI2)
CUMULANT_FAMILIES = (Family.CUM_IG, Family.CUM_GAMMA)

_DIST_OF = {
    Family.IG: mo.Dist.IG,
    Family.GAMMA: mo.Dist.GAMMA,
    Family.GAUSSIAN: mo.Dist.GAUSSIAN,
    Family.EXP: mo.Dist.EXP,
    Family.CHI2: mo.Dist.CHI2,
    Family.CUM_IG: mo.Dist.IG,
    Family.CUM_GAMMA: mo.Dist.GAMMA,
}

_MATRIX_ROWS = {
    Family.IG: 3,
    Family.GAMMA: 3,
    Family.GAUSSIAN: 3,
    Family.EXP: 2,
    Family.CHI2: 2,
    Family.CUM_IG: 2,
    Family.CUM_GAMMA: 2,
}


def family_rows(family: Family) -> int:
    return _MATRIX_ROWS[family]


def min_degree(family: Family) -> int:
    return 3 if _MATRIX_ROWS[family] == 3 else 2


def moment_table(d: int) -> VarTable:
    return VarTable([f"m{i}" for i in range(d + 1)])


def cumulant_table(d: int) -> VarTable:
    return VarTable([f"k{i}" for i in range(1, d + 1)])


def build_matrix(family: Family, d: int) -> PolyMatrix:
    """The family's structured matrix in the moment (or cumulant) variables."""
    family = Family(family)
    if d < min_degree(family):
        raise UsageError(f"{family.value} needs d >= {min_degree(family)}, got {d}")

    if family in CUMULANT_FAMILIES:
        table = cumulant_table(d)
        k = [None] + [table.variable(f"k{i}") for i in range(1, d + 1)]
        if family is Family.CUM_IG:
            top = [(2 * j - 1) * k[j] for j in range(1, d)]
        else:
            top = [Fraction(1, factorial(j - 1)) * k[j] for j in range(1, d)]
            bottom = [Fraction(1, factorial(j)) * k[j + 1] for j in range(1, d)]
            return PolyMatrix.from_rows(table, [top, bottom])
        bottom = [k[j + 1] for j in range(1, d)]
        return PolyMatrix.from_rows(table, [top, bottom])

    table = moment_table(d)
    m = [table.variable(f"m{i}") for i in range(d + 1)]
    if family is Family.IG:
        top = [m[0] * m[0]] + [m[c - 2] for c in range(2, d + 1)]
        mid = [table.zero()] + [(2 * c - 3) * m[c - 1] for c in range(2, d + 1)]
        bot = [m[1] * m[1]] + [m[c] for c in range(2, d + 1)]
        return PolyMatrix.from_rows(table, [top, mid, bot])
    if family is Family.GAMMA:
        top = [(c - 1) * m[c - 1] for c in range(1, d + 1)]
        mid = [m[c - 1] for c in range(1, d + 1)]
        bot = [m[c] for c in range(1, d + 1)]
        return PolyMatrix.from_rows(table, [top, mid, bot])
    if family is Family.GAUSSIAN:
        top = [table.zero()] + [(c - 1) * m[c - 2] for c in range(2, d + 1)]
        mid = [m[c - 1] for c in range(1, d + 1)]
        bot = [m[c] for c in range(1, d + 1)]
        return PolyMatrix.from_rows(table, [top, mid, bot])
    if family is Family.EXP:
        top = [c * m[c - 1] for c in range(1, d + 1)]
        bot = [m[c] for c in range(1, d + 1)]
        return PolyMatrix.from_rows(table, [top, bot])
    if family is Family.CHI2:
        p = mo.power_coordinates(d, table)
        return PolyMatrix.from_rows(table, [p[:d], p[1:]])
    raise UsageError(f"unknown family {family}")


def _chi2_redundant_matrix(d: int) -> PolyMatrix:
    """The 3-row chi-squared matrix whose minors vanish on the curve but cut
    out a surface; kept only as a vanishing regression case."""
    table = moment_table(d)
    m = [table.variable(f"m{i}") for i in range(d + 1)]
    top = [table.zero()] + [(2 * c - 2) * m[c - 1] for c in range(2, d + 1)]
    mid = [m[c - 1] for c in range(1, d + 1)]
    bot = [m[c] for c in range(1, d + 1)]
    return PolyMatrix.from_rows(table, [top, mid, bot])


def expected_generator_count(family: Family, d: int) -> int:
    family = Family(family)
    if family is Family.IG:
        return comb(d - 1, 3) + comb(d - 1, 2)
    if family in (Family.GAMMA, Family.GAUSSIAN):
        return comb(d, 3)
    if family in (Family.EXP, Family.CHI2):
        return comb(d, 2)
    return comb(d - 1, 2)


def generators(family: Family, d: int) -> list:
    """Ideal generators: the raw maximal minors, columns in increasing order."""
    family = Family(family)
    matrix = build_matrix(family, d)
    # a 2x1 cumulant matrix (d = 2) has no minors at all
    gens = [] if matrix.cols < matrix.rows else [minor for _, minor in matrix.maximal_minors()]
    count = expected_generator_count(family, d)
    if len(gens) != count:
        raise AssertionError(
            f"{family.value} d={d}: expected {count} generators, got {len(gens)}"
        )
    if family is Family.IG:
        quartics = sum(1 for g in gens if g.total_degree() == 4)
        cubics = sum(1 for g in gens if g.total_degree() == 3)
        if quartics != comb(d - 1, 2) or cubics != comb(d - 1, 3):
            raise AssertionError(
                f"ig d={d}: degree split {cubics} cubics / {quartics} quartics is off"
            )
    return gens


# -- kernel and vanishing verification ------------------------------------------


def _substituted_matrix(family: Family, d: int, chi2_naive: bool = False) -> tuple:
    """Matrix with the family's symbolic moment/cumulant sequence substituted,
    together with the parameter table it now lives over."""
    dist = _DIST_OF[family]
    ptable = mo.param_table(dist)
    if family in CUMULANT_FAMILIES:
        seq = mo.cumulants(dist, d).entries
        mapping = {f"k{i}": seq[i - 1] for i in range(1, d + 1)}
        matrix = build_matrix(family, d)
    else:
        seq = mo.moments(dist, d).entries
        mapping = {f"m{i}": seq[i] for i in range(d + 1)}
        matrix = _chi2_redundant_matrix(d) if chi2_naive else build_matrix(family, d)
    substituted = matrix.map_entries(lambda e: e.compose(mapping, ptable), ptable)
    return substituted, ptable


def kernel_vector(family: Family, table: VarTable) -> list:
    """The documented symbolic left-kernel vector over the parameter table."""
    family = Family(family)
    if family is Family.IG:
        mu, t = table.variable("mu"), table.variable("t")
        return [mu * mu, mu * mu * t, table.const(-1)]
    if family is Family.GAMMA:
        k, theta = table.variable("kpar"), table.variable("theta")
        return [theta, k * theta, table.const(-1)]
    if family is Family.GAUSSIAN:
        mu, s2 = table.variable("mu"), table.variable("s2")
        return [s2, mu, table.const(-1)]
    if family is Family.EXP:
        return [table.variable("lam"), table.const(-1)]
    if family is Family.CUM_IG:
        mu, t = table.variable("mu"), table.variable("t")
        return [mu * mu * t, table.const(-1)]
    if family is Family.CUM_GAMMA:
        return [table.variable("theta"), table.const(-1)]
    raise UsageError(f"no kernel vector documented for {family.value}")


@dataclass
class CheckReport:
    family: str
    d: int
    check: str
    ok: bool
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "d": self.d,
            "check": self.check,
            "pass": self.ok,
            "detail": self.detail,
        }


def verify_kernel(family: Family, d: int) -> CheckReport:
    """Check that the kernel vector annihilates the substituted matrix column
    by column, as an exact polynomial identity.  The chi-squared family is
    checked through its power-coordinate (Veronese) form instead."""
    family = Family(family)
    sub, ptable = _substituted_matrix(family, d)
    failures = []
    if family is Family.CHI2:
        k = ptable.variable("kpar")
        for j in range(sub.cols):
            if sub.entry(0, j) != k ** j or sub.entry(1, j) != k ** (j + 1):
                failures.append(j + 1)
        detail = {"mode": "veronese", "columns_failed": failures}
    else:
        vec = kernel_vector(family, ptable)
        for j in range(sub.cols):
            acc = ptable.zero()
            for r in range(sub.rows):
                acc = acc + vec[r] * sub.entry(r, j)
            if not acc.is_zero:
                failures.append(j + 1)
        detail = {"mode": "kernel", "columns_failed": failures}
    return CheckReport(family.value, d, "kernel", not failures, detail)


def verify_vanishing(family: Family, d: int, chi2_naive: bool = False) -> CheckReport:
    """Check that every generator vanishes under the parameterization.

    Substitution happens at the matrix level; since substitution is a ring
    homomorphism, the minors of the substituted matrix equal the substituted
    minors."""
    family = Family(family)
    if chi2_naive and family is not Family.CHI2:
        raise UsageError("the redundant matrix variant exists only for chi2")
    sub, _ = _substituted_matrix(family, d, chi2_naive=chi2_naive)
    failures = []
    checked = 0
    if sub.cols >= sub.rows:
        for cols, minor in sub.maximal_minors():
            checked += 1
            if not minor.is_zero:
                failures.append(list(cols))
    name = "vanishing-naive-chi2" if chi2_naive else "vanishing"
    return CheckReport(
        family.value, d, name, not failures,
        {"minors_checked": checked, "columns_failed": failures},
    )


# -- degrees and Hilbert series ---------------------------------------------------


def degree_formula(family: Family, d: int) -> int:
    family = Family(family)
    if d < 3:
        raise UsageError("degree formulas need d >= 3")
    if family is Family.IG:
        return (d - 1) ** 2
    if family is Family.GAMMA:
        return comb(d, 2)
    if family in CUMULANT_FAMILIES:
        return d - 1
    raise UsageError(f"no degree formula for {family.value}")


def hilbert_closed_form(family: Family, d: int) -> HilbertSeries:
    family = Family(family)
    if d < 3:
        raise UsageError("closed-form series need d >= 3")
    if family is Family.IG:
        return HilbertSeries.make((1, d - 2, comb(d - 1, 2), comb(d - 1, 2)), 3)
    if family is Family.GAMMA:
        return HilbertSeries.make((1, d - 2, comb(d - 1, 2)), 3)
    if family in CUMULANT_FAMILIES:
        return HilbertSeries.make((1, d - 2), 2)
    raise UsageError(f"no closed-form series for {family.value}")


def _antidiagonal_monomial(matrix: PolyMatrix, cols: Sequence[int]) -> tuple:
    """Exponent tuple of the antidiagonal product (row r with the r-th largest
    chosen column); entries must be single terms."""
    width = len(matrix.table)
    exp = [0] * width
    ordered = sorted(cols, reverse=True)
    for r, c in enumerate(ordered):
        entry = matrix.entry(r, c - 1)
        if len(entry.terms) != 1:
            raise UsageError("antidiagonal check needs single-term entries")
        (mono,) = entry.terms
        for i, e in enumerate(mono):
            exp[i] += e
    return tuple(exp)


def initial_ideal(family: Family, d: int, order: MonomialOrder | None = None) -> MonomialIdeal:
    """Leading monomials of the generators, minimalized.

    Validates per minor that the order makes the antidiagonal product the
    leading term; a violation raises OrderValidationError naming the columns.
    """
    family = Family(family)
    if family not in (Family.IG, Family.GAMMA):
        raise UsageError("initial ideals are produced for ig and gamma")
    matrix = build_matrix(family, d)
    if order is None:
        order = MonomialOrder(matrix.table)
    leads = []
    for cols, minor in matrix.maximal_minors():
        mono, _ = order.leading(minor)
        anti = _antidiagonal_monomial(matrix, cols)
        if mono != anti:
            raise OrderValidationError(
                cols,
                f"{family.value} d={d}: leading term of minor {cols} is not its "
                f"antidiagonal product under the given order",
            )
        leads.append(mono)
    return MonomialIdeal(matrix.table, leads)


def displayed_initial_ideal_ig(d: int) -> MonomialIdeal:
    """The cross-check form of the inverse Gaussian initial ideal:
    (m2..m_{d-2})^3 + m1^2 (m1..m_{d-2})^2."""
    table = moment_table(d)
    width = d + 1
    gens = []
    mids = list(range(2, d - 1))
    for a in mids:
        for b in mids:
            for c in mids:
                if a <= b <= c:
                    exp = [0] * width
                    exp[a] += 1
                    exp[b] += 1
                    exp[c] += 1
                    gens.append(tuple(exp))
    lows = list(range(1, d - 1))
    for a in lows:
        for b in lows:
            if a <= b:
                exp = [0] * width
                exp[1] += 2
                exp[a] += 1
                exp[b] += 1
                gens.append(tuple(exp))
    return MonomialIdeal(table, gens)


def groebner_degree_check(family: Family, d: int) -> CheckReport:
    """Compare the closed-form series with the series of the initial ideal
    computed through the independent monomial recursion."""
    family = Family(family)
    ideal = initial_ideal(family, d)
    via_monomials = monomial_hilbert(ideal)
    closed = hilbert_closed_form(family, d)
    ok = via_monomials == closed
    return CheckReport(
        family.value, d, "groebner-degree", ok,
        {
            "monomial_series": via_monomials.to_json(),
            "closed_series": closed.to_json(),
            "degree": closed.degree(),
        },
    )


# -- random rational points --------------------------------------------------------


def random_rational(rng: random.Random, nonzero: bool = False) -> Fraction:
    """Seeded rational with numerator in [-10^4, 10^4], denominator in [1, 10^3]."""
    for _ in range(64):
        q = Fraction(rng.randint(-10_000, 10_000), rng.randint(1, 1_000))
        if q != 0 or not nonzero:
            return q
    raise UsageError("failed to sample a nonzero rational")


def random_positive_rational(rng: random.Random) -> Fraction:
    return abs(random_rational(rng, nonzero=True))


# -- singular locus probes -----------------------------------------------------------

STRATA = ("smooth-random", "L1-line", "L2-line", "apex-point-0", "apex-point-d")


@dataclass
class ProbeReport:
    family: str
    d: int
    stratum: str
    rank: int
    codim: int
    singular: bool
    point: dict

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "d": self.d,
            "stratum": self.stratum,
            "rank": self.rank,
            "codim": self.codim,
            "singular": self.singular,
            "point": {k: str(v) for k, v in self.point.items()},
        }


def _stratum_point(family: Family, d: int, stratum: str, rng: random.Random) -> dict:
    point = {f"m{i}": Fraction(0) for i in range(d + 1)}
    if stratum == "smooth-random":
        dist = _DIST_OF[family]
        params = [random_positive_rational(rng) for _ in mo.PARAM_VARS[dist]]
        vals = mo.moment_values(dist, params, d)
        return {f"m{i}": vals[i] for i in range(d + 1)}
    if stratum == "apex-point-0":
        point["m0"] = Fraction(1)
        return point
    if stratum == "apex-point-d":
        point[f"m{d}"] = Fraction(1)
        return point
    if stratum == "L1-line":
        # generic point of a boundary curve inside {m0 = 0}: for the inverse
        # Gaussian the line with m_{d-1}, m_d free; for gamma one of the d-1
        # curves with m_i, m_d free
        i = d - 1 if family is Family.IG else rng.randrange(1, d)
        point[f"m{i}"] = random_rational(rng, nonzero=True)
        point[f"m{d}"] = random_rational(rng, nonzero=True)
        return point
    if stratum == "L2-line":
        # the boundary curve m1 = .. = m_{d-1} = 0 with m0, m_d free; this is
        # the only middle-zero curve actually contained in the gamma variety
        point["m0"] = random_rational(rng, nonzero=True)
        point[f"m{d}"] = random_rational(rng, nonzero=True)
        return point
    raise UsageError(f"unknown stratum {stratum!r}")


def singular_probe(family: Family, d: int, stratum: str, seed: int) -> ProbeReport:
    """Exact Jacobian rank of the generator system at a stratum point.

    The verdict compares the rank against the codimension d-2: strictly
    smaller means the point is singular on the variety.
    """
    family = Family(family)
    if family not in (Family.IG, Family.GAMMA):
        raise UsageError("singular probes are defined for ig and gamma")
    rng = random.Random(seed)
    point = _stratum_point(family, d, stratum, rng)
    gens = generators(family, d)
    for g in gens:
        if g.eval(point) != 0:
            raise UsageError(f"probe point is not on the variety (stratum {stratum})")
    names = [f"m{i}" for i in range(d + 1)]
    jac = [[g.diff(n).eval(point) for n in names] for g in gens]
    rank = rank_exact(jac)
    codim = d - 2
    return ProbeReport(family.value, d, stratum, rank, codim, rank < codim, point)


def expected_singular(family: Family, stratum: str) -> bool:
    """Published verdict per stratum: the inverse Gaussian is singular along
    the m0=..=m_{d-2}=0 line and at the all-but-m0 point; the gamma family
    only at the two apex points."""
    family = Family(family)
    if stratum in ("apex-point-0", "apex-point-d"):
        return True
    if stratum == "L1-line":
        return family is Family.IG
    return False


# -- secant nondefectiveness ----------------------------------------------------------


@dataclass
class SecantReport:
    family: str
    d: int
    k: int
    rank: int
    expected: int
    nondefective: bool

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "d": self.d,
            "k": self.k,
            "rank": self.rank,
            "expected": self.expected,
            "nondefective": self.nondefective,
        }


def secant_jacobian_rank(family: Family, d: int, k: int, seed: int) -> SecantReport:
    """Exact rank of the mixture-map Jacobian at a random rational point.

    The map sends k parameter pairs plus k-1 mixing weights to the moment
    vector (m_1..m_d); nondefective means the rank hits min(d, 3k-1).
    """
    family = Family(family)
    if family not in (Family.IG, Family.GAMMA, Family.GAUSSIAN):
        raise UsageError("secant ranks are defined for ig, gamma, gaussian")
    if d < 2 or k < 1:
        raise UsageError("need d >= 2 and k >= 1")
    dist = _DIST_OF[family]
    pnames = mo.PARAM_VARS[dist]
    seq = mo.moments(dist, d)
    partials = {v: [e.diff(v) for e in seq.entries] for v in pnames}

    rng = random.Random(seed)
    comps = None
    for _ in range(16):
        candidate = [tuple(random_positive_rational(rng) for _ in pnames) for _ in range(k)]
        if len(set(candidate)) == k:
            comps = candidate
            break
    if comps is None:
        raise UsageError("could not sample distinct component parameters")
    alphas = [random_rational(rng, nonzero=True) for _ in range(k - 1)]
    alpha_last = Fraction(1) - sum(alphas, Fraction(0))
    weights = alphas + [alpha_last]

    def at(polys, comp):
        values = dict(zip(pnames, comp))
        return [p.eval(values) for p in polys]

    moments_at = [at(seq.entries, c) for c in comps]
    jac_rows = []
    for r in range(1, d + 1):
        row = []
        for i in range(k - 1):
            row.append(moments_at[i][r] - moments_at[k - 1][r])
        for i in range(k):
            values = dict(zip(pnames, comps[i]))
            for v in pnames:
                row.append(weights[i] * partials[v][r].eval(values))
        jac_rows.append(row)

    rank = rank_exact(jac_rows)
    expected = min(d, 3 * k - 1)
    return SecantReport(family.value, d, k, rank, expected, rank == expected)
