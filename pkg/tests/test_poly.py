import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mvt.poly import MonomialOrder, MultiPoly, UsageError, VarTable


@pytest.fixture
def m_table():
    return VarTable(["m0", "m1", "m2", "m3"])


def gen_from_example(table):
    m = {i: table.variable(f"m{i}") for i in range(4)}
    return -(m[0] ** 2 * m[1] * m[3]) + 3 * m[0] ** 2 * m[2] ** 2 - 3 * m[0] * m[1] ** 2 * m[2] + m[1] ** 4


class TestArithmetic:
    def test_mul_by_zero_absorbs(self, m_table):
        p = m_table.variable("m1") + m_table.variable("m2")
        assert (p * m_table.zero()).is_zero

    def test_additive_inverse(self, m_table):
        p = m_table.variable("m1")
        assert (p - p).is_zero

    def test_product_collects_exponents(self, m_table):
        m0, m1, m3 = (m_table.variable(v) for v in ("m0", "m1", "m3"))
        got = (m0 * m1) * (m0 * m3)
        assert got == m_table.monomial(1, {"m0": 2, "m1": 1, "m3": 1})

    def test_mismatched_tables_rejected(self, m_table):
        other = VarTable(["x"])
        with pytest.raises(UsageError):
            m_table.variable("m0") + other.variable("x")

    def test_integer_scalars_coerce(self, m_table):
        p = 2 * m_table.variable("m1") + 1
        assert p.eval({"m1": Fraction(3)}) == 7


class TestDiffEval:
    def test_power_rule(self, m_table):
        p = m_table.variable("m1") ** 4
        assert p.diff("m1") == 4 * m_table.variable("m1") ** 3

    def test_example_generator_partial(self, m_table):
        gen = gen_from_example(m_table)
        want = -(m_table.variable("m0") ** 2) * m_table.variable("m1")
        assert gen.diff("m3") == want

    def test_constant_derivative_is_zero(self, m_table):
        assert m_table.const(5).diff("m2").is_zero

    def test_eval_square(self, m_table):
        assert (m_table.variable("m1") ** 2).eval({"m1": 3}) == 9

    def test_generator_vanishes_on_moments(self, m_table):
        # inverse Gaussian moments at mu = lambda = 1
        gen = gen_from_example(m_table)
        assert gen.eval({"m0": 1, "m1": 1, "m2": 2, "m3": 7}) == 0

    def test_signed_cancellation_at_all_ones(self, m_table):
        gen = gen_from_example(m_table)
        assert gen.eval({f"m{i}": 1 for i in range(4)}) == 0

    def test_missing_assignment_rejected(self, m_table):
        with pytest.raises(UsageError):
            gen_from_example(m_table).eval({"m0": 1})

    def test_unknown_variable_rejected(self, m_table):
        with pytest.raises(UsageError):
            m_table.variable("m1").diff("zz")


class TestCanonicalString:
    def test_golden_format(self, m_table):
        gen = gen_from_example(m_table)
        assert gen.to_str() == "-1 m0^2 m1 m3 + 3 m0^2 m2^2 - 3 m0 m1^2 m2 + 1 m1^4"

    def test_zero(self, m_table):
        assert m_table.zero().to_str() == "0"

    def test_fraction_coefficients(self, m_table):
        p = Fraction(1, 2) * m_table.variable("m1")
        assert p.to_str() == "1/2 m1"

    def test_leading_term_is_last_in_ascending_order(self, m_table):
        order = MonomialOrder(m_table)
        gen = gen_from_example(m_table)
        mono, coeff = order.leading(gen)
        assert mono == (0, 4, 0, 0) and coeff == 1


def small_polys(table):
    coeff = st.integers(-4, 4)
    mono = st.tuples(*(st.integers(0, 2) for _ in range(len(table))))
    return st.dictionaries(mono, coeff, max_size=4).map(
        lambda terms: MultiPoly(table, {m: Fraction(c) for m, c in terms.items()})
    )


_T = VarTable(["x", "y", "z"])


@settings(max_examples=60, deadline=None)
@given(small_polys(_T), small_polys(_T), small_polys(_T))
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c


@settings(max_examples=40, deadline=None)
@given(small_polys(_T), small_polys(_T))
def test_diff_is_leibniz(a, b):
    lhs = (a * b).diff("x")
    rhs = a.diff("x") * b + a * b.diff("x")
    assert lhs == rhs


def test_compose_matches_eval():
    rng = random.Random(3)
    table = VarTable(["m0", "m1", "m2", "m3"])
    target = VarTable(["u", "v"])
    gen = gen_from_example(table)
    images = {}
    for name in table.names:
        u, v = target.variable("u"), target.variable("v")
        images[name] = rng.randint(-3, 3) * u + rng.randint(-3, 3) * v * v + rng.randint(-2, 2)
    composed = gen.compose(images, target)
    for _ in range(10):
        pt = {"u": Fraction(rng.randint(-5, 5), rng.randint(1, 4)),
              "v": Fraction(rng.randint(-5, 5), rng.randint(1, 4))}
        direct = gen.eval({n: images[n].eval(pt) for n in table.names})
        assert composed.eval(pt) == direct
