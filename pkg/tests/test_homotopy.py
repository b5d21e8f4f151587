import numpy as np
import pytest

from mvt.homotopy import (
    CompiledSystem,
    dedup_solutions,
    parameter_track,
    total_degree_solve,
)
from mvt.poly import UsageError, VarTable


@pytest.fixture
def xy():
    return VarTable(["x", "y"])


class TestCompiledSystem:
    def test_eval_and_jacobian(self, xy):
        x, y = xy.variable("x"), xy.variable("y")
        sys = CompiledSystem([x * x + y * y - 1, x - y], ["x", "y"])
        pt = np.array([2.0 + 0j, 0.5 + 0j])
        vals = sys.eval(pt)
        assert np.allclose(vals, [3.25, 1.5])
        jac = sys.jac_x(pt)
        assert np.allclose(jac, [[4.0, 1.0], [1.0, -1.0]])

    def test_parameter_jacobian(self):
        t = VarTable(["x", "p"])
        x, p = t.variable("x"), t.variable("p")
        sys = CompiledSystem([x * x - p], ["x"], ["p"])
        jp = sys.jac_p(np.array([3.0 + 0j]), np.array([1.0 + 0j]))
        assert np.allclose(jp, [[-1.0]])

    def test_unassigned_variable_rejected(self, xy):
        x = xy.variable("x")
        with pytest.raises(UsageError):
            CompiledSystem([x + xy.variable("y")], ["x"])

    def test_degrees_recorded(self, xy):
        x, y = xy.variable("x"), xy.variable("y")
        sys = CompiledSystem([x ** 3 * y - 1, y * y - x], ["x", "y"])
        assert sys.degrees == (4, 2)


class TestTotalDegree:
    def test_quadratic_roots(self):
        t = VarTable(["x"])
        x = t.variable("x")
        rep = total_degree_solve([x * x - 1], ["x"], seed=1)
        roots = sorted(round(s.point[0].real, 8) for s in rep.solutions)
        assert roots == [-1.0, 1.0]
        assert rep.regular_count == 2
        assert all(s.is_real for s in rep.solutions)

    def test_circle_line_intersection(self):
        t = VarTable(["x", "y"])
        x, y = t.variable("x"), t.variable("y")
        rep = total_degree_solve([x * x + y * y - 1, x - y], ["x", "y"], seed=2)
        assert rep.regular_count == 2
        for s in rep.solutions:
            assert abs(s.point[0] - s.point[1]) < 1e-8
            assert abs(s.point[0] ** 2 + s.point[1] ** 2 - 1) < 1e-8

    def test_determinism(self):
        t = VarTable(["x", "y"])
        x, y = t.variable("x"), t.variable("y")
        eqs = [x * x * y - 1, x + y * y - 3]
        a = total_degree_solve(eqs, ["x", "y"], seed=11)
        b = total_degree_solve(eqs, ["x", "y"], seed=11)
        assert [s.point for s in a.solutions] == [s.point for s in b.solutions]

    def test_counts_stable_across_gamma_seeds(self):
        t = VarTable(["x", "y"])
        x, y = t.variable("x"), t.variable("y")
        eqs = [x * x * y - 1, x + y * y - 3]
        counts = {total_degree_solve(eqs, ["x", "y"], seed=s).regular_count for s in (3, 4)}
        assert len(counts) == 1

    def test_workers_do_not_change_result(self):
        t = VarTable(["x", "y"])
        x, y = t.variable("x"), t.variable("y")
        eqs = [x * x + y * y - 4, x * y - 1]
        a = total_degree_solve(eqs, ["x", "y"], seed=5, workers=1)
        b = total_degree_solve(eqs, ["x", "y"], seed=5, workers=2)
        assert [s.point for s in a.solutions] == [s.point for s in b.solutions]

    def test_extra_newton_steps_keep_residual_small(self):
        t = VarTable(["x", "y"])
        x, y = t.variable("x"), t.variable("y")
        eqs = [x * x + y * y - 1, x - y]
        sys = CompiledSystem(eqs, ["x", "y"])
        rep = total_degree_solve(eqs, ["x", "y"], seed=2)
        for s in rep.solutions:
            z = np.asarray(s.point)
            for _ in range(3):
                z = z - np.linalg.solve(sys.jac_x(z), sys.eval(z))
            assert np.max(np.abs(sys.eval(z))) <= max(s.residual, 1e-12)


class TestParameterTrack:
    def test_square_root_continuation(self):
        t = VarTable(["x", "p"])
        x, p = t.variable("x"), t.variable("p")
        sys = CompiledSystem([x * x - p], ["x"], ["p"])
        sols = parameter_track(sys, [1.0], [[1.0], [-1.0]], [4.0],
                               rng=np.random.default_rng(5))
        got = sorted(s.point[0].real for s in sols)
        assert np.allclose(got, [-2.0, 2.0], atol=1e-8)

    def test_identity_move_returns_same_solutions(self):
        t = VarTable(["x", "p"])
        x, p = t.variable("x"), t.variable("p")
        sys = CompiledSystem([x * x - p], ["x"], ["p"])
        sols = parameter_track(sys, [1.0], [[1.0], [-1.0]], [1.0],
                               rng=np.random.default_rng(7))
        got = sorted(s.point[0].real for s in sols)
        assert np.allclose(got, [-1.0, 1.0], atol=1e-8)

    def test_scale_jump_tracks_cleanly(self):
        # start and target parameters five orders of magnitude apart
        t = VarTable(["x", "p"])
        x, p = t.variable("x"), t.variable("p")
        sys = CompiledSystem([x * x - p], ["x"], ["p"])
        sols = parameter_track(sys, [1.0e6], [[1.0e3], [-1.0e3]], [9.0],
                               rng=np.random.default_rng(1))
        got = sorted(s.point[0].real for s in sols)
        assert np.allclose(got, [-3.0, 3.0], atol=1e-7)

    def test_bad_start_solution_rejected(self):
        t = VarTable(["x", "p"])
        x, p = t.variable("x"), t.variable("p")
        sys = CompiledSystem([x * x - p], ["x"], ["p"])
        with pytest.raises(UsageError):
            parameter_track(sys, [1.0], [[5.0]], [4.0], rng=np.random.default_rng(0))


class TestDedup:
    def test_merges_close_points(self):
        from mvt.homotopy import Solution

        a = Solution((1.0 + 0j,), 0.0, 1.0, "regular", True, 0)
        b = Solution((1.0 + 1e-12j,), 0.0, 1.0, "regular", True, 1)
        c = Solution((2.0 + 0j,), 0.0, 1.0, "regular", True, 2)
        assert len(dedup_solutions([a, b, c], 1e-8)) == 2
