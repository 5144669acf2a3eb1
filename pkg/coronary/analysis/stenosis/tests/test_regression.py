import numpy as np
import pytest

from coronary.miscellaneous.errors import DegenerateGeometryError
from coronary.analysis.stenosis.actions import RadiusProfile, RegressionParams, \
    compute_kappa, healthy_radius, stenosis_degree, validate_params


def naive_prominence(signal, peak):
    height = signal[peak]
    left = peak
    while left > 0 and signal[left - 1] <= height:
        left -= 1
    right = peak
    while right < len(signal) - 1 and signal[right + 1] <= height:
        right += 1
    return height - max(min(signal[left:peak + 1]), min(signal[peak:right + 1]))


def naive_kappa(radius):
    inverted = -np.asarray(radius)
    spread = radius.max() - radius.min()
    dips = [i for i in range(1, len(radius) - 1)
            if inverted[i] > inverted[i - 1] and inverted[i] > inverted[i + 1]]
    if not dips:
        return spread / 2.0
    return (max(naive_prominence(inverted, i) for i in dips) + spread) / 2.0


def naive_healthy_radius(radius, params):
    n = len(radius)
    r_max = np.empty(n)
    for i in range(n):
        num = den = 0.0
        for j in range(n):
            k = np.exp(-(j - i) ** 2 / (2.0 * params.sigma_max ** 2))
            num += k * radius[j]
            den += k
        r_max[i] = num / den + params.kappa
    w = [np.exp(-(radius[i] - r_max[i]) ** 2 / (2.0 * params.sigma_r ** 2))
         / (params.sigma_r * np.sqrt(2.0 * np.pi)) for i in range(n)]
    r_h = np.empty(n)
    for i in range(n):
        num = den = 0.0
        for j in range(n):
            k = np.exp(-(j - i) ** 2 / (2.0 * params.sigma_x ** 2))
            num += k * w[j] * radius[j]
            den += k * w[j]
        r_h[i] = num / den
    return r_max, np.array(w), r_h


def profile_of(radius, spacing=0.5):
    radius = np.asarray(radius, dtype=float)
    return RadiusProfile(spacing * np.arange(len(radius)), radius)


def random_profile(rng, n):
    gamma = np.arange(n) * 0.5
    radius = 1.5 + 0.2 * np.sin(gamma / 4.0 + rng.uniform(0, 6))
    radius += rng.normal(0, 0.05, n)
    center = rng.uniform(0.3, 0.7) * gamma[-1]
    radius *= 1 - rng.uniform(0.2, 0.6) * np.exp(-(gamma - center) ** 2 / (2 * 2.0 ** 2))
    return profile_of(radius)


class TestRadiusProfile:

    def test_rejects_short_profiles(self):
        with pytest.raises(DegenerateGeometryError):
            profile_of([1.0, 1.0, 1.0, 1.0])

    def test_rejects_non_increasing_abscissa(self):
        with pytest.raises(DegenerateGeometryError):
            RadiusProfile([0, 1, 1, 2, 3], [1, 1, 1, 1, 1])

    def test_resample_uniform_grid(self):
        profile = RadiusProfile([0.0, 0.3, 1.0, 2.2, 3.0], [1.0, 1.3, 2.0, 3.2, 4.0])
        resampled = profile.resample(0.5)
        np.testing.assert_allclose(resampled.abscissa, [0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0])
        np.testing.assert_allclose(resampled.radius, resampled.abscissa + 1.0)


class TestComputeKappa:

    def test_constant_profile(self):
        assert compute_kappa(profile_of([2.0] * 20)) == 0.0

    def test_single_dip(self):
        radius = [2.0] * 21
        radius[10] = 1.0
        assert compute_kappa(profile_of(radius)) == pytest.approx(1.0)

    def test_matches_exhaustive_prominence_scan(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            profile = profile_of(rng.uniform(1.0, 3.0, rng.integers(5, 60)))
            expected = naive_kappa(profile.radius)
            assert compute_kappa(profile) == pytest.approx(expected, rel=1e-12)


class TestHealthyRadius:

    def test_constant_profile_is_fixed_point(self):
        profile = profile_of([2.0] * 40)
        params = RegressionParams(10.4, 21.5, 0.296, compute_kappa(profile))
        result = healthy_radius(profile, params)
        np.testing.assert_array_equal(result.r_h, 2.0)
        assert np.max(np.abs(stenosis_degree(profile, result.r_h).sd)) < 1e-12

    def test_five_point_double_loop(self):
        profile = profile_of([2, 2, 1, 2, 2])
        params = RegressionParams(1.0, 2.0, 0.3, compute_kappa(profile))
        result = healthy_radius(profile, params)
        r_max, w, r_h = naive_healthy_radius(profile.radius, params)
        np.testing.assert_allclose(result.r_max, r_max, rtol=1e-12)
        np.testing.assert_allclose(result.w, w, rtol=1e-12)
        np.testing.assert_allclose(result.r_h, r_h, rtol=1e-12)

    def test_random_profiles_match_double_loop(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            profile = random_profile(rng, int(rng.integers(50, 120)))
            params = RegressionParams(rng.uniform(10, 17.5), rng.uniform(3.67, 50),
                                      rng.uniform(0.25, 0.556), compute_kappa(profile))
            _, _, r_h = naive_healthy_radius(profile.radius, params)
            np.testing.assert_allclose(healthy_radius(profile, params).r_h, r_h, rtol=1e-12)

    def test_convex_combination(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            profile = random_profile(rng, 80)
            params = RegressionParams(12.0, 20.0, 0.3, compute_kappa(profile))
            r_h = healthy_radius(profile, params).r_h
            assert np.all(r_h >= profile.radius.min() - 1e-12)
            assert np.all(r_h <= profile.radius.max() + 1e-12)

    def test_scale_equivariance(self):
        profile = random_profile(np.random.default_rng(5), 100)
        params = RegressionParams(12.0, 20.0, 0.3, compute_kappa(profile))
        scale = 1.7
        scaled = profile_of(profile.radius * scale)
        scaled_params = params._replace(sigma_r=params.sigma_r * scale, kappa=params.kappa * scale)
        r_h = healthy_radius(profile, params).r_h
        scaled_r_h = healthy_radius(scaled, scaled_params).r_h
        np.testing.assert_allclose(scaled_r_h, scale * r_h, rtol=1e-12)
        np.testing.assert_allclose(stenosis_degree(scaled, scaled_r_h).sd,
                                   stenosis_degree(profile, r_h).sd, atol=1e-12)

    def test_vanishing_weights_fall_back_and_flag(self):
        radius = [2.0] * 30
        radius[15] = 0.2
        profile = profile_of(radius)
        params = RegressionParams(0.5, 4.0, 1e-3, 50.0)
        result = healthy_radius(profile, params)
        assert 'weights_vanished' in result.flags
        assert np.all(np.isfinite(result.r_h))

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            validate_params(RegressionParams(0.0, 10.0, 0.3, 0.1))
        with pytest.raises(ValueError):
            validate_params(RegressionParams(12.0, 10.0, 0.3, 0.1),
                            {'sigma_x': (10, 11), 'sigma_max': (3, 50), 'sigma_r': (0.2, 0.6)})


class TestStenosisDegree:

    def test_equal_radius(self):
        profile = profile_of([1.0] * 5)
        np.testing.assert_array_equal(stenosis_degree(profile, [1.0] * 5).sd, 0.0)

    def test_half_radius(self):
        profile = profile_of([1.0] * 5)
        np.testing.assert_allclose(stenosis_degree(profile, [2.0] * 5).sd, 0.5)

    def test_negative_where_radius_exceeds_healthy(self):
        profile = profile_of([3.0] * 5)
        assert np.all(stenosis_degree(profile, [2.0] * 5).sd < 0)

    def test_rejects_non_positive_healthy_radius(self):
        with pytest.raises(ValueError):
            stenosis_degree(profile_of([1.0] * 5), [1.0, 1.0, 0.0, 1.0, 1.0])
