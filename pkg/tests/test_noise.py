import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gammaln

from molreg.errors import DomainError
from molreg.grid import Grid2D, RealField, l2_norm
from molreg.noise import NoiseSpec, add_noise, expected_chi_norm, noise_level, noise_rng


class TestChiNorm:
    @pytest.mark.parametrize("M,expected", [(1, math.sqrt(2 / math.pi)), (2, math.sqrt(math.pi / 2))])
    def test_small_closed_forms(self, M, expected):
        assert expected_chi_norm(M) == pytest.approx(expected, rel=1e-14)

    @settings(max_examples=30, deadline=None)
    @given(M=st.integers(1, 400))
    def test_matches_log_gamma(self, M):
        ref = math.sqrt(2) * math.exp(gammaln((M + 1) / 2) - gammaln(M / 2))
        assert expected_chi_norm(M) == pytest.approx(ref, rel=1e-12)

    def test_large_M_asymptotic(self):
        M = 256 ** 2
        # sqrt(M) (1 - 1/(4M) + 1/(32 M^2))
        assert expected_chi_norm(M) == pytest.approx(math.sqrt(M) * (1 - 1 / (4 * M) + 1 / (32 * M * M)), rel=1e-14)

    @pytest.mark.parametrize("M", [0, -1, 2.5])
    def test_invalid(self, M):
        with pytest.raises(DomainError):
            expected_chi_norm(M)


class TestAddNoise:
    def test_zero_noise_is_identity(self):
        g = RealField(Grid2D(8, 1.0), np.ones((8, 8)))
        out, delta = add_noise(g, NoiseSpec(0.0))
        assert out is g and delta == 0.0

    def test_delta_definition(self):
        g = RealField(Grid2D(8, 1.0), np.ones((8, 8)))
        assert noise_level(g, 5.0) == pytest.approx(0.05 * l2_norm(g))

    def test_mean_noise_norm_calibrated(self):
        grid = Grid2D(32, 2.0)
        g = RealField(grid, np.ones(grid.shape))
        norms = []
        for i in range(400):
            gd, delta = add_noise(g, NoiseSpec(10.0, seed=1, index=i))
            norms.append(l2_norm(gd - g))
        assert np.mean(norms) == pytest.approx(delta, rel=5e-3)

    def test_streams_reproducible_and_independent(self):
        a = noise_rng(7, 0).standard_normal(5)
        np.testing.assert_array_equal(a, noise_rng(7, 0).standard_normal(5))
        assert not np.array_equal(a, noise_rng(7, 1).standard_normal(5))
        assert not np.array_equal(a, noise_rng(8, 0).standard_normal(5))

    def test_negative_percent(self):
        with pytest.raises(DomainError):
            NoiseSpec(-1.0)
