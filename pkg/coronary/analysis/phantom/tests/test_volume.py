import numpy as np
import pytest

from coronary.miscellaneous.errors import PhantomSpecError
from coronary.analysis.pcat.actions import RoiKind, TubeROI, measure_roi
from coronary.analysis.phantom.actions import PhantomSpec, GridSpec, HuSampler, fit_grid, \
    gen_pcat_volume


def straight_roi(length=20.0, lumen=1.5, factor=3.0, offset=(0.0, 0.0, 0.0)):
    z = np.linspace(0.0, length, 21)
    points = np.column_stack([np.zeros_like(z), np.zeros_like(z), z]) + np.asarray(offset)
    return TubeROI(points, np.full(len(z), factor * lumen), np.full(len(z), lumen), 0.0, length,
                   RoiKind.PER_VESSEL, branch='LAD')


class TestFitGrid:

    def test_covers_the_tubes_with_margin(self):
        roi = straight_roi()
        grid = fit_grid(GridSpec(0.4), [(roi.points, roi.outer_radius)])
        far_corner = grid.origin + grid.spacing * (np.array(grid.dims) - 1)
        assert np.allclose(grid.origin, [-6.5, -6.5, -6.5])
        assert np.all(far_corner >= [6.5, 6.5, 26.5])

    def test_explicit_dims(self):
        grid = fit_grid(GridSpec(0.5, (10, 12, 14), (1.0, 2.0, 3.0)), [])
        assert grid.dims == (10, 12, 14)
        assert np.array_equal(grid.origin, [1.0, 2.0, 3.0])


class TestPcatVolume:

    def test_constant_sampler(self):
        spec = PhantomSpec(0, hu_sampler=HuSampler.constant(-80))
        volume, lumen, truth = gen_pcat_volume(spec, straight_roi())
        assert truth.rois[0].fai == -80.0
        assert truth.rois[0].hu_multiset == [[-80, truth.rois[0].fat_voxels]]
        assert truth.lumen_voxels >= 300
        assert np.all(volume.data[lumen.data] == 300)
        assert truth.flags == []

    def test_measured_features_match_truth(self):
        roi = straight_roi()
        volume, lumen, truth = gen_pcat_volume(PhantomSpec(3), roi)
        _, row = measure_roi(roi, volume, lumen)
        assert row.features.fat_voxels == truth.rois[0].fat_voxels
        assert row.features.roi_voxels == truth.rois[0].roi_voxels
        assert row.features.fai == truth.rois[0].fai
        assert sum(count for _, count in truth.rois[0].hu_multiset) == truth.rois[0].fat_voxels

    def test_out_of_window_values_are_excluded(self):
        sampler = HuSampler([-100, 0], [0.5, 0.5])
        roi = straight_roi()
        volume, lumen, truth = gen_pcat_volume(PhantomSpec(1, hu_sampler=sampler), roi)
        record = truth.rois[0]
        assert record.fai == -100.0
        assert 0 < record.fat_voxels < record.roi_voxels

    def test_several_rois(self):
        rois = [straight_roi(), straight_roi(offset=(12.0, 0.0, 0.0))]
        _, _, truth = gen_pcat_volume(PhantomSpec(2), rois)
        assert len(truth.rois) == 2
        assert truth.rois[0].roi_voxels == truth.rois[1].roi_voxels

    def test_deterministic(self):
        a = gen_pcat_volume(PhantomSpec(4), straight_roi())[0]
        b = gen_pcat_volume(PhantomSpec(4), straight_roi())[0]
        assert np.array_equal(a.data, b.data)

    def test_coarse_grid_flagged(self):
        _, _, truth = gen_pcat_volume(PhantomSpec(0, grid=GridSpec(1.5)), straight_roi())
        assert truth.flags == ['coarse_grid']

    def test_roi_outside_an_explicit_grid(self):
        spec = PhantomSpec(0, grid=GridSpec(0.4, (10, 10, 10), (100.0, 100.0, 100.0)))
        with pytest.raises(PhantomSpecError):
            gen_pcat_volume(spec, straight_roi())
