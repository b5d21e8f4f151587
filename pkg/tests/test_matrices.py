import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mvt.matrices import PolyMatrix, det_permutation_sum, rank_exact
from mvt.poly import UsageError, VarTable
from mvt.varieties import Family, build_matrix


def const_matrix(table, rows):
    return PolyMatrix.from_rows(table, [[table.const(v) for v in row] for row in rows])


class TestDet:
    def test_identity(self):
        t = VarTable(["x"])
        m = const_matrix(t, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
        assert m.det() == t.const(1)

    def test_printed_ig_determinant(self):
        m = build_matrix(Family.IG, 3)
        assert m.det().to_str() == "1 m0^2 m1 m3 - 3 m0^2 m2^2 + 3 m0 m1^2 m2 - 1 m1^4"

    def test_printed_gamma_determinant(self):
        m = build_matrix(Family.GAMMA, 3)
        assert m.det().to_str() == "-1 m0 m1 m3 + 2 m0 m2^2 - 1 m1^2 m2"

    def test_non_square_rejected(self):
        m = build_matrix(Family.IG, 4)
        with pytest.raises(UsageError):
            m.det()

    def test_agrees_with_permutation_sum(self):
        rng = random.Random(11)
        t = VarTable(["x"])
        for _ in range(25):
            rows = [[Fraction(rng.randint(-6, 6), rng.randint(1, 3)) for _ in range(3)]
                    for _ in range(3)]
            got = const_matrix(t, rows).det()
            assert got == t.const(det_permutation_sum(rows))


class TestMinors:
    def test_two_by_two_single_minor(self):
        t = VarTable(["x", "y"])
        m = PolyMatrix.from_rows(t, [[t.variable("x"), t.variable("y")],
                                     [t.const(1), t.variable("x")]])
        minors = m.maximal_minors()
        assert len(minors) == 1
        assert minors[0][0] == (1, 2)
        assert minors[0][1] == t.variable("x") ** 2 - t.variable("y")

    def test_lexicographic_column_sets(self):
        m = build_matrix(Family.IG, 5)
        cols = [c for c, _ in m.maximal_minors()]
        assert cols == sorted(cols)
        assert len(cols) == 10

    def test_rows_exceed_cols_rejected(self):
        t = VarTable(["x"])
        m = const_matrix(t, [[1], [2]])
        with pytest.raises(UsageError):
            m.maximal_minors()


class TestRank:
    def test_zero_matrix(self):
        assert rank_exact([[0, 0], [0, 0]]) == 0

    def test_identity(self):
        assert rank_exact([[1, 0, 0], [0, 1, 0], [0, 0, 1]]) == 3

    def test_ig_matrix_at_moments_has_rank_two(self):
        m = build_matrix(Family.IG, 3)
        # moments of mu = lambda = 1
        vals = {"m0": 1, "m1": 1, "m2": 2, "m3": 7}
        assert rank_exact(m.evaluate(vals)) == 2

    def test_known_rank_product(self):
        rng = random.Random(5)
        for r in (1, 2, 3):
            a = [[Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(r)] for _ in range(5)]
            b = [[Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(6)] for _ in range(r)]
            prod = [[sum(a[i][t] * b[t][j] for t in range(r)) for j in range(6)] for i in range(5)]
            assert rank_exact(prod) == r


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=6),
                         min_size=4, max_size=4), min_size=3, max_size=6))
def test_rank_equals_transpose_rank(rows):
    cols = list(map(list, zip(*rows)))
    assert rank_exact(rows) == rank_exact(cols)
