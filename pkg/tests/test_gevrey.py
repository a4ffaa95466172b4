"""Gevrey norms, smoothing operators, radius estimation, rescaling."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kdvrad.errors import InsufficientSpectralRangeError, SpectralOverflowError
from kdvrad.gevrey import (GevreyParams, estimate_radius, gevrey_norm, hs_norm,
                           rescale, smooth)
from kdvrad.grid import GridSpec, SpectralField, forward_transform
from kdvrad.solver import airy_propagate, soliton

from conftest import random_band_field


def exponential_tail_field(grid, a):
    """Field with coeff(k) = exp(-a |xi_k|) (Hermitian by construction)."""
    return SpectralField(grid, np.exp(-a * np.abs(grid.xi)) + 0j)


class TestGevreyNorm:
    def test_reduces_to_l2(self, small_grid, rng):
        f = random_band_field(small_grid, rng)
        assert gevrey_norm(f, GevreyParams(0.0, 0.0)) == pytest.approx(f.l2_norm(), rel=1e-13)

    def test_single_mode_sobolev_weight(self, default_grid):
        g = default_grid
        f = forward_transform(np.cos(np.pi * g.x / 40.0), g)
        expected = f.l2_norm() * np.sqrt(1.0 + (np.pi / 40.0) ** 2)
        assert gevrey_norm(f, GevreyParams(0.0, 1.0)) == pytest.approx(expected, rel=1e-12)

    def test_exponential_field_against_band_sum_oracle(self, small_grid):
        # independent oracle: plain Riemann sum of exp((2sigma-2a)|xi|)/(2pi)
        # over the grid band, written without the package's weighting code
        a, sig = 1.0, 0.5
        f = exponential_tail_field(small_grid, a)
        xi = small_grid.xi
        dxi = np.pi / small_grid.half_length
        oracle = np.sqrt(np.sum(np.exp((2 * sig - 2 * a) * np.abs(xi))) * dxi / (2 * np.pi))
        assert gevrey_norm(f, GevreyParams(sig, 0.0)) == pytest.approx(oracle, rel=1e-8)

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 10 ** 6),
           sig=st.floats(0.0, 0.3), sig2=st.floats(0.0, 0.3),
           s=st.floats(-1.0, 1.0), s2=st.floats(-1.0, 1.0))
    def test_monotone_in_sigma_and_s(self, seed, sig, sig2, s, s2):
        g = GridSpec(128, 20.0)
        f = random_band_field(g, np.random.default_rng(seed), max_mode=16)
        lo = gevrey_norm(f, GevreyParams(min(sig, sig2), min(s, s2)))
        hi = gevrey_norm(f, GevreyParams(max(sig, sig2), max(s, s2)))
        assert lo <= hi * (1 + 1e-12)

    def test_embedding_with_explicit_grid_maximum(self, small_grid, rng):
        f = random_band_field(small_grid, rng, max_mode=20)
        sig, sig2 = 0.4, 0.1
        s, s2 = 0.0, 0.5
        xi = small_grid.xi
        factor = np.max(np.exp((sig2 - sig) * np.abs(xi)) * (1 + xi ** 2) ** ((s2 - s) / 2))
        lhs = gevrey_norm(f, GevreyParams(sig2, s2))
        rhs = gevrey_norm(f, GevreyParams(sig, s)) * factor
        assert lhs <= rhs * (1 + 1e-12)

    def test_overflow_carries_certifiable_sigma(self, small_grid):
        f = exponential_tail_field(small_grid, 0.05)
        with pytest.raises(SpectralOverflowError) as exc:
            gevrey_norm(f, GevreyParams(40.0, 0.0))
        cert = exc.value.certifiable_sigma
        assert 0.0 < cert < 40.0
        gevrey_norm(f, GevreyParams(0.95 * cert, 0.0))  # certified value works

    def test_free_flow_preserves_every_gevrey_norm(self, small_grid, rng):
        f = random_band_field(small_grid, rng, max_mode=16)
        p = GevreyParams(0.3, -0.5)
        before = gevrey_norm(f, p)
        after = gevrey_norm(airy_propagate(f, 3.7), p)
        assert after == pytest.approx(before, rel=1e-13)


class TestSmooth:
    def test_zero_is_identity(self, small_grid, rng):
        f = random_band_field(small_grid, rng)
        assert np.array_equal(smooth(f, 0.0).coeffs, f.coeffs)

    def test_round_trip(self, small_grid, rng):
        f = random_band_field(small_grid, rng, max_mode=20)
        back = smooth(smooth(f, 0.7), -0.7)
        assert np.max(np.abs(back.coeffs - f.coeffs)) < 1e-10 * np.max(np.abs(f.coeffs))

    def test_sech_smoothing_shifts_tail_rate(self, default_grid):
        # the sech transform decays at rate pi/2; smoothing by sigma < pi/2
        # reduces the tail slope by exactly sigma.  Band-limit first: past the
        # roundoff floor exp(sigma*|xi|) amplifies noise into a rising tail.
        from kdvrad.grid import apply_multiplier
        f = forward_transform(1.0 / np.cosh(default_grid.x), default_grid)
        f = apply_multiplier(f, lambda xi: (np.abs(xi) <= 18.0).astype(float))
        sm = smooth(f, 1.0)
        assert np.all(np.isfinite(sm.coeffs))
        est = estimate_radius(sm)
        assert est.sigma_hat == pytest.approx(np.pi / 2 - 1.0, rel=0.05)

    def test_overflow(self, small_grid):
        f = exponential_tail_field(small_grid, 0.01)
        with pytest.raises(SpectralOverflowError):
            smooth(f, 80.0)


class TestEstimateRadius:
    def test_exact_exponential(self, default_grid):
        f = exponential_tail_field(default_grid, 0.7)
        est = estimate_radius(f)
        assert est.sigma_hat == pytest.approx(0.7, abs=1e-6)
        assert est.residual < 1e-8
        assert not est.superexponential

    def test_gaussian_flags_superexponential(self, default_grid):
        f = forward_transform(np.exp(-default_grid.x ** 2), default_grid)
        est = estimate_radius(f)
        assert est.superexponential

    def test_soliton_pole_distance(self, default_grid):
        f = soliton(default_grid, speed=1.0)
        est = estimate_radius(f)
        assert est.sigma_hat == pytest.approx(np.pi, rel=0.05)
        f4 = soliton(default_grid, speed=4.0)
        est4 = estimate_radius(f4)
        assert est4.sigma_hat == pytest.approx(np.pi / 2.0, rel=0.05)

    def test_insufficient_range(self, small_grid):
        f = forward_transform(np.cos(np.pi * small_grid.x / 40.0), small_grid)
        with pytest.raises(InsufficientSpectralRangeError):
            estimate_radius(f)

    def test_smoothing_shifts_estimate_exactly(self, default_grid):
        f = exponential_tail_field(default_grid, 0.9)
        base = estimate_radius(f).sigma_hat
        shifted = estimate_radius(smooth(f, -0.5)).sigma_hat
        assert shifted == pytest.approx(base + 0.5, abs=1e-6)


class TestRescale:
    def test_identity(self, small_grid, rng):
        f = random_band_field(small_grid, rng)
        g = rescale(f, 1.0)
        assert np.array_equal(g.coeffs, f.coeffs)
        assert g.grid == f.grid

    def test_l2_scaling_exact(self, small_grid, rng):
        f = random_band_field(small_grid, rng)
        lam = 0.5
        g = rescale(f, lam)
        assert g.l2_norm() == pytest.approx(lam ** 1.5 * f.l2_norm(), rel=1e-13)

    def test_scaled_norm_identity(self, default_grid):
        # ||f_lam||_{sigma,s} equals lam^(3/2) (sum exp(2 sigma lam |xi|)
        # <lam xi>^(2s) |f_hat|^2 w)^(1/2) exactly on the grid
        f = forward_transform(1.0 / np.cosh(default_grid.x), default_grid)
        lam, sig, s = 0.25, 0.3, -0.75
        g = rescale(f, lam)
        lhs = gevrey_norm(g, GevreyParams(sig, s))
        xi = default_grid.xi
        w = default_grid.spectral_weight
        rhs = lam ** 1.5 * np.sqrt(np.sum(
            np.exp(2 * sig * lam * np.abs(xi)) * (1 + (lam * xi) ** 2) ** s
            * np.abs(f.coeffs) ** 2) * w)
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_scaling_exponent_on_high_frequency_data(self, default_grid):
        # with s = -3/4 and data concentrated at |xi| >> 1/lam the measured
        # norms follow lam^(3/2+s) = lam^(3/4); the Sobolev factor only bites
        # at high frequency, so a high carrier makes the exponent visible
        g = default_grid
        f = forward_transform(np.cos(20.0 * g.x) / np.cosh(g.x), g)
        s = -0.75
        lams = np.array([0.5, 0.25, 0.125])
        norms = [gevrey_norm(rescale(f, l), GevreyParams(0.0, s)) for l in lams]
        slope = np.polyfit(np.log(lams), np.log(norms), 1)[0]
        assert slope == pytest.approx(0.75, abs=0.15)
        # plain sech data satisfies the lam^(3/4) bound with a fixed constant
        sig = 0.2
        fs = forward_transform(1.0 / np.cosh(g.x), g)
        base = gevrey_norm(fs, GevreyParams(sig, s))
        for l in lams:
            assert gevrey_norm(rescale(fs, l), GevreyParams(l * sig, s)) <= 2.0 * l ** 0.75 * base

    def test_max_grid_rejection(self, small_grid, rng):
        f = random_band_field(small_grid, rng)
        with pytest.raises(ValueError, match="maximum"):
            rescale(f, 0.001, max_half_length=1000.0)
