import numpy as np
import pytest

from coronary.analysis.stenosis.actions import RadiusProfile, RegressionParams, \
    compute_kappa, healthy_radius, detect_peaks, regression_loss, optimize_params, \
    default_bounds
from .test_regression import naive_prominence, random_profile


def profile_of(radius, spacing=0.5):
    radius = np.asarray(radius, dtype=float)
    return RadiusProfile(spacing * np.arange(len(radius)), radius)


def naive_peaks(radius, spacing, diameters=2.5, fraction=0.25):
    maxima = [i for i in range(1, len(radius) - 1)
              if radius[i] > radius[i - 1] and radius[i] > radius[i + 1]]
    distance = max(1, int(np.ceil(diameters * 2 * np.mean(radius) / spacing - 1e-9)))
    kept = []
    for i in sorted(maxima, key=lambda i: -radius[i]):
        if all(abs(i - j) >= distance for j in kept):
            kept.append(i)
    if not kept:
        return []
    prominences = {i: naive_prominence(radius, i) for i in kept}
    top = max(prominences.values())
    return sorted(i for i in kept if prominences[i] >= fraction * top)


class TestDetectPeaks:

    def test_monotone_profile_uses_endpoints(self):
        peaks = detect_peaks(profile_of(np.linspace(1.0, 2.0, 30)))
        assert list(peaks.indices) == [0, 29]
        assert peaks.flags == ('no_peaks',)

    def test_close_peaks_keep_the_higher(self):
        radius = np.full(60, 1.5)
        radius[20] = 1.6
        radius[22] = 1.7
        peaks = detect_peaks(profile_of(radius))
        assert list(peaks.indices) == [22]
        assert peaks.flags == ()

    def test_matches_greedy_separation_oracle(self):
        rng = np.random.default_rng(21)
        for _ in range(50):
            radius = rng.uniform(1.0, 2.0, int(rng.integers(10, 200)))
            expected = naive_peaks(radius, 0.5)
            if not expected:
                continue
            assert list(detect_peaks(profile_of(radius)).indices) == expected


class TestRegressionLoss:

    def test_zero_when_healthy_matches(self):
        profile = profile_of([2.0] * 30)
        params = RegressionParams(12.0, 20.0, 0.3, 0.0)
        assert regression_loss(params, profile) == 0.0

    def test_single_peak_offset(self):
        profile = random_profile(np.random.default_rng(2), 80)
        params = RegressionParams(12.0, 20.0, 0.3, compute_kappa(profile))
        r_h = healthy_radius(profile, params).r_h
        peak = 40
        expected = (r_h[peak] - profile.radius[peak]) ** 2
        assert regression_loss(params, profile, [peak]) == pytest.approx(expected, rel=0, abs=1e-15)

    def test_matches_recomputation(self):
        profile = random_profile(np.random.default_rng(4), 150)
        params = RegressionParams(11.0, 30.0, 0.4, compute_kappa(profile))
        peaks = detect_peaks(profile).indices
        r_h = healthy_radius(profile, params).r_h
        expected = sum((r_h[i] - profile.radius[i]) ** 2 for i in peaks) / len(peaks)
        assert regression_loss(params, profile) == pytest.approx(expected, abs=1e-15)


class TestOptimizeParams:

    def test_healthy_vessel(self):
        result = optimize_params(profile_of([1.8] * 120))
        assert result.loss < 1e-6

    def test_within_bounds_and_never_worse_than_grid(self):
        rng = np.random.default_rng(9)
        bounds = default_bounds()
        for _ in range(5):
            result = optimize_params(random_profile(rng, 120), grid_points=4)
            assert result.loss <= result.grid_loss
            for name in ('sigma_x', 'sigma_max', 'sigma_r'):
                low, high = bounds[name]
                assert low <= getattr(result.params, name) <= high

    def test_deterministic(self):
        profile = random_profile(np.random.default_rng(13), 100)
        first = optimize_params(profile, grid_points=4)
        second = optimize_params(profile, grid_points=4)
        assert first.params == second.params
        assert first.loss == second.loss
        np.testing.assert_array_equal(first.peaks.indices, second.peaks.indices)

    def test_kappa_fixed(self):
        profile = random_profile(np.random.default_rng(17), 100)
        result = optimize_params(profile, grid_points=3)
        assert result.params.kappa == compute_kappa(profile)
        assert result.grid_params.kappa == compute_kappa(profile)

    def test_invalid_bounds(self):
        bounds = default_bounds()
        bounds['sigma_r'] = (0.0, 0.5)
        with pytest.raises(ValueError):
            optimize_params(profile_of([1.8] * 20), bounds)
