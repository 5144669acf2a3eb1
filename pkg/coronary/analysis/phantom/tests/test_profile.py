import numpy as np
import pytest
from scipy.optimize import brentq

from coronary.miscellaneous.errors import PhantomSpecError
from coronary.analysis.geometry.actions import Centerline
from coronary.analysis.stenosis.actions import analyze_vessel
from coronary.analysis.phantom.actions import LesionSpec, PhantomSpec, HuSampler, \
    gen_radius_profile, lesion_shape


def straight_centerline(profile):
    gamma = profile.abscissa
    points = np.column_stack([gamma, np.zeros_like(gamma), np.zeros_like(gamma)])
    return Centerline(points, profile.radius)


class TestRadiusProfile:

    def test_no_lesion_is_the_baseline(self):
        profile, truth = gen_radius_profile(PhantomSpec(0, taper_mm=0.3))
        assert np.allclose(profile.radius, truth.healthy_radius)
        assert np.allclose(truth.sd, 0.0)
        assert profile.radius[0] == 1.5
        assert profile.radius[-1] == pytest.approx(1.2)

    def test_half_depth_minimum(self):
        profile, truth = gen_radius_profile(PhantomSpec(0, lesions=[LesionSpec(30.0, 0.5, 8.0)]))
        assert profile.radius.min() == pytest.approx(0.75)
        assert profile.abscissa[np.argmin(profile.radius)] == 30.0
        assert truth.sd.max() == pytest.approx(0.5)

    @pytest.mark.parametrize('shape', ['gaussian', 'cosine'])
    def test_crossings_against_root_finding(self, shape):
        lesion = LesionSpec(25.0, 0.6, 9.0, shape)
        _, truth = gen_radius_profile(PhantomSpec(0, lesions=[lesion]))
        for level, key in ((0.10, '0.10'), (0.20, '0.20')):
            def excess(gamma):
                return lesion.depth * lesion_shape(lesion, gamma) - level
            right = brentq(excess, lesion.center_mm, lesion.center_mm + lesion.width_mm / 2)
            low, high = truth.lesions[0].crossings[key]
            assert high == pytest.approx(right, abs=1e-6)
            assert low == pytest.approx(2 * lesion.center_mm - right, abs=1e-6)

    def test_shallow_lesion_has_no_crossing(self):
        _, truth = gen_radius_profile(PhantomSpec(0, lesions=[LesionSpec(25.0, 0.15, 6.0)]))
        assert truth.lesions[0].crossings['0.20'] is None
        assert truth.lesions[0].crossings['0.10'] is not None

    def test_deterministic_ripple(self):
        a, _ = gen_radius_profile(PhantomSpec(5, ripple=0.05))
        b, _ = gen_radius_profile(PhantomSpec(5, ripple=0.05))
        c, _ = gen_radius_profile(PhantomSpec(6, ripple=0.05))
        assert np.array_equal(a.radius, b.radius)
        assert not np.array_equal(a.radius, c.radius)


class TestSpecValidation:

    @pytest.mark.parametrize('lesion', [LesionSpec(30.0, 1.0, 8.0), LesionSpec(30.0, 0.0, 8.0),
                                        LesionSpec(30.0, 0.5, 2.0)])
    def test_invalid_lesion(self, lesion):
        with pytest.raises(PhantomSpecError):
            PhantomSpec(0, lesions=[lesion])

    def test_overlapping_lesions(self):
        with pytest.raises(PhantomSpecError):
            PhantomSpec(0, lesions=[LesionSpec(30.0, 0.5, 8.0), LesionSpec(35.0, 0.5, 8.0)])

    def test_unknown_shape(self):
        with pytest.raises(ValueError):
            PhantomSpec(0, lesions=[LesionSpec(30.0, 0.5, 8.0, 'box')])

    def test_taper_consumes_the_radius(self):
        with pytest.raises(PhantomSpecError):
            PhantomSpec(0, radius_mm=1.0, taper_mm=1.0)

    @pytest.mark.parametrize('values, weights', [([-80, -90], [1.0]), ([-2000], [1.0]),
                                                 ([-80], [0.0])])
    def test_invalid_sampler(self, values, weights):
        with pytest.raises(PhantomSpecError):
            HuSampler(values, weights)


class TestLesionRecovery:

    def test_single_planted_lesion(self):
        lesion = LesionSpec(30.0, 0.5, 8.0)
        profile, truth = gen_radius_profile(PhantomSpec(0, lesions=[lesion]))
        report = analyze_vessel(straight_centerline(profile), 'LAD')
        assert len(report.lesions) == 1
        found = report.lesions[0]
        low, high = truth.lesions[0].crossings['0.10']
        assert abs(found.dist_ostium_mm - lesion.center_mm) <= 1.0
        assert found.start_mm <= lesion.center_mm <= found.end_mm
        assert found.start_mm >= low - 2.0
        assert found.end_mm <= high + 2.0
        assert 0.3 <= found.max_sd <= 0.6

    def test_healthy_vessel_has_no_lesion(self):
        profile, _ = gen_radius_profile(PhantomSpec(0, taper_mm=0.4, ripple=0.02))
        assert analyze_vessel(straight_centerline(profile), 'RCA').lesions == []

    @pytest.mark.parametrize('seed', range(20))
    def test_seeded_lesion_batch(self, seed):
        rng = np.random.default_rng(seed)
        lesion = LesionSpec(float(rng.uniform(25.0, 35.0)), float(rng.uniform(0.4, 0.6)),
                            float(rng.uniform(7.0, 10.0)), ('gaussian', 'cosine')[seed % 2])
        profile, truth = gen_radius_profile(PhantomSpec(seed, taper_mm=0.2, ripple=0.02,
                                                        lesions=[lesion]))
        report = analyze_vessel(straight_centerline(profile), 'LAD')
        hits = [found for found in report.lesions
                if found.start_mm - 2.0 <= lesion.center_mm <= found.end_mm + 2.0]
        assert len(hits) == 1
        low, high = truth.lesions[0].crossings['0.10']
        assert hits[0].start_mm >= low - 2.0
        assert hits[0].end_mm <= high + 2.0
        assert lesion.depth - 0.2 <= hits[0].max_sd <= lesion.depth + 0.1
