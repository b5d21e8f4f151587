"""Moment and cumulant sequences for five classical distributions.

Every sequence is produced by one generic recursion that works over any
coefficient ring, so the symbolic sequences (MultiPoly entries) and the exact
numeric ones (Fraction entries) share a single code path.  The inverse
Gaussian is parameterized by (mu, t) with t the reciprocal shape parameter,
which keeps all moment expressions polynomial.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Sequence

from .poly import MultiPoly, UsageError, VarTable


class Dist(str, enum.Enum):
    IG = "ig"
    GAMMA = "gamma"
    GAUSSIAN = "gaussian"
    EXP = "exp"
    CHI2 = "chi2"


PARAM_VARS = {
    Dist.IG: ("mu", "t"),
    Dist.GAMMA: ("kpar", "theta"),
    Dist.GAUSSIAN: ("mu", "s2"),
    Dist.EXP: ("lam",),
    Dist.CHI2: ("kpar",),
}


def param_table(kind: Dist) -> VarTable:
    return VarTable(PARAM_VARS[kind])


@dataclass(frozen=True)
class MomentSequence:
    kind: Dist
    d: int
    entries: tuple  # m_0 .. m_d


@dataclass(frozen=True)
class CumulantSequence:
    kind: Dist
    d: int
    entries: tuple  # kappa_1 .. kappa_d


def double_factorial(n: int) -> int:
    """n!! with the empty-product convention for n <= 0."""
    result = 1
    while n > 1:
        result *= n
        n -= 2
    return result


def _moment_entries(kind: Dist, d: int, params: Sequence, one):
    """Shared recursion core; ``params`` are ring elements, ``one`` the unit."""
    if kind is Dist.IG:
        mu, t = params
        seq = [one, mu]
        for i in range(2, d + 1):
            seq.append((2 * i - 3) * (t * (mu * mu) * seq[i - 1]) + (mu * mu) * seq[i - 2])
    elif kind is Dist.GAMMA:
        k, theta = params
        seq = [one]
        for i in range(1, d + 1):
            seq.append(theta * seq[i - 1] * (k + (i - 1) * one))
    elif kind is Dist.GAUSSIAN:
        mu, s2 = params
        seq = [one, mu]
        for i in range(2, d + 1):
            seq.append(mu * seq[i - 1] + (i - 1) * (s2 * seq[i - 2]))
    elif kind is Dist.EXP:
        (lam,) = params
        seq = [one]
        for i in range(1, d + 1):
            seq.append(i * (lam * seq[i - 1]))
    elif kind is Dist.CHI2:
        (k,) = params
        seq = [one]
        for i in range(1, d + 1):
            seq.append(seq[i - 1] * (k + (2 * i - 2) * one))
    else:  # pragma: no cover
        raise UsageError(f"unknown distribution {kind}")
    return seq[: d + 1]


def moments(kind: Dist, d: int) -> MomentSequence:
    """Symbolic moments m_0..m_d in the distribution's parameter variables."""
    if d < 0:
        raise UsageError("d must be >= 0")
    table = param_table(kind)
    params = [table.variable(v) for v in PARAM_VARS[kind]]
    return MomentSequence(kind, d, tuple(_moment_entries(kind, d, params, table.const(1))))


def moment_values(kind: Dist, params: Sequence, d: int) -> list:
    """Exact numeric moments m_0..m_d at rational parameter values."""
    vals = [Fraction(p) for p in params]
    return _moment_entries(kind, d, vals, Fraction(1))


def moment_floats(kind: Dist, params: Sequence, d: int) -> list:
    """Floating moments m_0..m_d (fast path for estimation)."""
    return _moment_entries(kind, d, [float(p) for p in params], 1.0)


def cumulants(kind: Dist, d: int) -> CumulantSequence:
    """Symbolic cumulants kappa_1..kappa_d (inverse Gaussian or gamma only)."""
    if d < 1:
        raise UsageError("d must be >= 1")
    table = param_table(kind)
    if kind is Dist.IG:
        mu = table.variable("mu")
        t = table.variable("t")
        entries = [double_factorial(2 * r - 3) * (mu ** (2 * r - 1) * t ** (r - 1)) for r in range(1, d + 1)]
    elif kind is Dist.GAMMA:
        k = table.variable("kpar")
        theta = table.variable("theta")
        entries = [factorial(r - 1) * (k * theta ** r) for r in range(1, d + 1)]
    else:
        raise UsageError(f"cumulants are provided for ig and gamma, not {kind.value}")
    return CumulantSequence(kind, d, tuple(entries))


def _unit_like(value):
    if isinstance(value, MultiPoly):
        return value.table.const(1)
    return Fraction(1)


def moments_to_cumulants(ms: Sequence) -> list:
    """Map (m_1..m_d) to (kappa_1..kappa_d); inputs are normalized to m_0 = 1.

    Inverts the convolution m_n = sum_{i=1}^{n} C(n-1, i-1) kappa_i m_{n-i}.
    Works on numbers and on polynomials alike.
    """
    ms = list(ms)
    if not ms:
        return []
    one = _unit_like(ms[0])
    m = [one] + ms
    kappas: list = []
    for n in range(1, len(m)):
        acc = m[n]
        for i in range(1, n):
            acc = acc - comb(n - 1, i - 1) * (kappas[i - 1] * m[n - i])
        kappas.append(acc)
    return kappas


def cumulants_to_moments(ks: Sequence) -> list:
    """Inverse of moments_to_cumulants: (kappa_1..kappa_d) to (m_1..m_d)."""
    ks = list(ks)
    if not ks:
        return []
    one = _unit_like(ks[0])
    m = [one]
    for n in range(1, len(ks) + 1):
        acc = comb(n - 1, 0) * (ks[0] * m[n - 1])
        for i in range(2, n + 1):
            acc = acc + comb(n - 1, i - 1) * (ks[i - 1] * m[n - i])
        m.append(acc)
    return m[1:]


def stirling_second(n: int, k: int) -> int:
    """Stirling numbers of the second kind S(n, k); k > n gives 0."""
    if k < 0 or n < 0:
        raise UsageError("stirling numbers need non-negative indices")
    if k > n:
        return 0
    row = [1]  # S(0, 0)
    for i in range(1, n + 1):
        new = [0] * (i + 1)
        for j in range(1, i + 1):
            new[j] = j * (row[j] if j < len(row) else 0) + row[j - 1]
        row = new
    return row[k]


def stirling_first(n: int, k: int) -> int:
    """Signed Stirling numbers of the first kind s(n, k); k > n gives 0."""
    if k < 0 or n < 0:
        raise UsageError("stirling numbers need non-negative indices")
    if k > n:
        return 0
    row = [1]  # s(0, 0)
    for i in range(1, n + 1):
        new = [0] * (i + 1)
        for j in range(0, i + 1):
            upper = row[j] if j < len(row) else 0
            new[j] = (row[j - 1] if j >= 1 else 0) - (i - 1) * upper
        row = new
    return row[k]


def stirling(kind: str, n: int, k: int) -> int:
    if kind == "first_signed":
        return stirling_first(n, k)
    if kind == "second":
        return stirling_second(n, k)
    raise UsageError(f"unknown stirling kind {kind!r}")


def power_coordinates(d: int, table: VarTable) -> list:
    """Linear forms p_0..p_d in m_0..m_d that carry chi-squared moments to
    plain parameter powers: substituting the chi-squared moments into p_j
    yields exactly k^j."""
    if d < 0:
        raise UsageError("d must be >= 0")
    out = [table.variable("m0")]
    for j in range(1, d + 1):
        p = table.zero()
        for i in range(1, j + 1):
            coeff = (-2) ** (j - i) * stirling_second(j, i)
            if coeff:
                p = p + coeff * table.variable(f"m{i}")
        out.append(p)
    return out
