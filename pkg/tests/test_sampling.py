import numpy as np
import pytest

from mvt.moments import Dist
from mvt.poly import UsageError
from mvt.sampling import MixtureModel, mixture_moment_floats, sample, sample_moments


class TestModelValidation:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(UsageError):
            MixtureModel(Dist.IG, [(1, 1), (2, 2)], [0.5, 0.6])

    def test_positive_parameters(self):
        with pytest.raises(UsageError):
            MixtureModel(Dist.GAMMA, [(-1, 1)], [1.0])

    def test_gaussian_mean_may_be_negative(self):
        MixtureModel(Dist.GAUSSIAN, [(-2.0, 1.0)], [1.0])

    def test_arity_enforced(self):
        with pytest.raises(UsageError):
            MixtureModel(Dist.EXP, [(1.0, 2.0)], [1.0])


class TestSamplers:
    def test_exponential_mean(self):
        data = sample(MixtureModel(Dist.EXP, [(1.0,)], [1.0]), 10 ** 6, seed=42)
        assert abs(data.mean() - 1.0) < 5e-3

    def test_gamma_second_moment(self):
        data = sample(MixtureModel(Dist.GAMMA, [(2.0, 1.0)], [1.0]), 10 ** 6, seed=7)
        assert abs((data ** 2).mean() - 6.0) < 0.1

    def test_gamma_small_shape_boost(self):
        data = sample(MixtureModel(Dist.GAMMA, [(0.5, 2.0)], [1.0]), 10 ** 6, seed=9)
        assert abs(data.mean() - 1.0) < 0.01
        assert abs(data.var() - 2.0) < 0.05

    def test_ig_variance_relation(self):
        mu, lam = 2.0, 5.0
        data = sample(MixtureModel(Dist.IG, [(mu, lam)], [1.0]), 10 ** 6, seed=3)
        assert abs(data.mean() - mu) < 0.01
        assert abs(data.var() - mu ** 3 / lam) < 0.02

    def test_gaussian_polar(self):
        data = sample(MixtureModel(Dist.GAUSSIAN, [(1.0, 4.0)], [1.0]), 10 ** 6, seed=3)
        assert abs(data.mean() - 1.0) < 0.01
        assert abs(data.var() - 4.0) < 0.05

    def test_chi2_moments(self):
        data = sample(MixtureModel(Dist.CHI2, [(3.0,)], [1.0]), 10 ** 6, seed=3)
        assert abs(data.mean() - 3.0) < 0.02
        assert abs(data.var() - 6.0) < 0.1

    def test_deterministic_per_seed(self):
        model = MixtureModel(Dist.IG, [(1, 5), (2, 20)], [0.4, 0.6])
        a = sample(model, 5000, seed=11)
        b = sample(model, 5000, seed=11)
        c = sample(model, 5000, seed=12)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_mixture_mean_matches_model(self):
        model = MixtureModel(Dist.IG, [(1, 5), (2, 20)], [0.4, 0.6])
        data = sample(model, 10 ** 6, seed=1)
        want = mixture_moment_floats(model, 1)[0]
        assert abs(data.mean() - want) < 0.01


class TestSampleMoments:
    def test_constant_data(self):
        sm = sample_moments([1.0, 1.0, 1.0], 3)
        assert sm.values == [1.0, 1.0, 1.0]
        assert sm.n == 3

    def test_two_point_data(self):
        sm = sample_moments([0.0, 2.0], 2)
        assert sm.values == [1.0, 2.0]

    def test_large_sample_near_exact(self):
        data = sample(MixtureModel(Dist.GAMMA, [(2.0, 1.0)], [1.0]), 10 ** 6, seed=5)
        sm = sample_moments(data, 5)
        want = [2.0, 6.0, 24.0, 120.0, 720.0]
        for got, w in zip(sm.values, want):
            assert abs(got - w) / w < 0.05

    def test_overflow_names_order(self):
        with pytest.raises(UsageError, match="order 3"):
            sample_moments([1e150, 2e150], 3)

    def test_degenerate_variance_warning(self):
        sm = sample_moments([2.0, 2.0], 2)
        assert sm.warnings
