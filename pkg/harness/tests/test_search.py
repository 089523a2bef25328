import math

import numpy as np
from scipy import stats

from tsh_harness.search import (
    SearchSpace,
    derive_seed,
    sample_hyperparameters,
    sample_slope,
    splitmix64,
)


class TestSeedDerivation:
    def test_splitmix_deterministic_and_spread(self):
        values = {splitmix64(i) for i in range(1000)}
        assert len(values) == 1000
        assert splitmix64(42) == splitmix64(42)

    def test_derive_seed_sensitivity(self):
        base = derive_seed(7, "fold", 0, "tsh-svm")
        assert base == derive_seed(7, "fold", 0, "tsh-svm")
        assert base != derive_seed(7, "fold", 1, "tsh-svm")
        assert base != derive_seed(7, "fold", 0, "bl-rf")
        assert base != derive_seed(8, "fold", 0, "tsh-svm")


class TestSlopeSampling:
    def test_boundary_angle_is_exact(self):
        space = SearchSpace()

        class FixedRng:
            def uniform(self, low, high):
                return low  # angle at the interval minimum

            def random(self):
                return 0.9  # negative sign branch

        assert sample_slope(space, FixedRng()) == -0.5

    def test_no_sample_in_excluded_band(self):
        rng = np.random.default_rng(0)
        space = SearchSpace()
        slopes = np.array([sample_slope(space, rng) for _ in range(100_000)])
        assert (np.abs(slopes) >= 0.5).all()
        assert (np.abs(slopes) <= 4.0).all()
        assert (slopes > 0).any() and (slopes < 0).any()

    def test_angle_uniformity(self):
        rng = np.random.default_rng(1)
        space = SearchSpace()
        angles = np.array(
            [math.atan(abs(sample_slope(space, rng))) for _ in range(100_000)]
        )
        lo, hi = math.atan(0.5), math.atan(4.0)
        statistic, _ = stats.kstest(angles, stats.uniform(lo, hi - lo).cdf)
        assert statistic < 0.01


class TestHyperparameterSampling:
    def test_bandwidth_log_uniform(self):
        rng = np.random.default_rng(2)
        space = SearchSpace()
        draws = np.array(
            [
                math.log10(sample_hyperparameters(space, rng)["bandwidth_sigma"])
                for _ in range(100_000)
            ]
        )
        statistic, _ = stats.kstest(draws, stats.uniform(-3.0, 2.0).cdf)
        assert statistic < 0.01

    def test_kernel_dependent_c_ranges(self):
        rng = np.random.default_rng(3)
        space = SearchSpace()
        for _ in range(2000):
            params = sample_hyperparameters(space, rng)
            if params["kernel"] == "linear":
                assert 1e-2 <= params["svm_c"] <= 1e1
                assert params["svm_gamma"] is None
            else:
                assert 1e-1 <= params["svm_c"] <= 1e2
                assert 1e-4 <= params["svm_gamma"] <= 1e-2

    def test_kind_restriction(self):
        rng = np.random.default_rng(4)
        space = SearchSpace().with_kinds(["sloped"])
        kinds = {sample_hyperparameters(space, rng)["kind"] for _ in range(50)}
        assert kinds == {"sloped"}

    def test_horizontal_keeps_unit_slope(self):
        rng = np.random.default_rng(5)
        space = SearchSpace().with_kinds(["horizontal"])
        for _ in range(20):
            assert sample_hyperparameters(space, rng)["slope_c"] == 1.0

    def test_deterministic_given_rng_state(self):
        space = SearchSpace()
        a = sample_hyperparameters(space, np.random.default_rng(6))
        b = sample_hyperparameters(space, np.random.default_rng(6))
        assert a == b
