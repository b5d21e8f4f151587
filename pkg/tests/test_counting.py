import numpy as np
import pytest

from mvt.counting import (
    ed_degree,
    mixture_system,
    mixture_unknowns,
    patch_generator,
    plant_mixture,
    swap_images,
)
from mvt.poly import UsageError
from mvt.varieties import Family


class TestPatchGenerators:
    def test_printed_hypersurfaces(self):
        assert patch_generator(Family.IG).to_str() == "1 m1 m3 - 3 m2^2 + 3 m1^2 m2 - 1 m1^4"
        assert patch_generator(Family.GAMMA).to_str() == "-1 m1 m3 + 2 m2^2 - 1 m1^2 m2"
        assert patch_generator(Family.GAUSSIAN).to_str() == "-1 m3 + 3 m1 m2 - 2 m1^3"

    def test_unsupported_family(self):
        with pytest.raises(UsageError):
            patch_generator(Family.EXP)


class TestEdDegree:
    def test_gaussian_count(self):
        rep = ed_degree(Family.GAUSSIAN, seed=0)
        assert rep.count == 7
        assert rep.solve.paths_tracked <= 256

    def test_gaussian_count_second_seed(self):
        assert ed_degree(Family.GAUSSIAN, seed=1).count == 7


class TestMixtureSystem:
    def test_structure(self):
        sys, unknowns, params = mixture_system(Family.IG, 2)
        assert unknowns == ["mu1", "t1", "mu2", "t2", "a1"]
        assert params == [f"mt{r}" for r in range(1, 6)]
        assert sys.n == 5 and sys.q == 5 and sys.n_eqs == 5

    def test_planted_point_solves_system(self):
        import random

        sys, _, _ = mixture_system(Family.GAMMA, 2)
        x, base, _ = plant_mixture(Family.GAMMA, 2, random.Random(4))
        res = np.max(np.abs(sys.eval(x, base)) / (1.0 + sys.residual_scale(x, base)))
        assert res < 1e-12

    def test_well_separated_planting(self):
        import random

        for seed in range(8):
            _, _, model = plant_mixture(Family.IG, 2, random.Random(seed))
            means = [float(c[0]) for c in model["components"]]
            assert max(means) >= 1.5 * min(means)
            assert all(0.05 <= float(w) <= 0.95 for w in model["weights"])

    def test_unknown_naming(self):
        assert mixture_unknowns(Family.GAUSSIAN, 3) == [
            "mu1", "s21", "mu2", "s22", "mu3", "s23", "a1", "a2",
        ]


class TestSwapImages:
    def test_k2_swap(self):
        imgs = swap_images([1.0, 2.0, 3.0, 4.0, 0.3], 2, 2)
        assert len(imgs) == 2
        np.testing.assert_allclose(imgs[0].real, [1, 2, 3, 4, 0.3])
        np.testing.assert_allclose(imgs[1].real, [3, 4, 1, 2, 0.7])

    def test_k3_orbit_size(self):
        imgs = swap_images(list(range(6)) + [0.2, 0.3], 3, 2)
        assert len(imgs) == 6
        for img in imgs:
            tail = img[6:].real
            assert 0 <= tail.sum() <= 1.0 + 1e-12
