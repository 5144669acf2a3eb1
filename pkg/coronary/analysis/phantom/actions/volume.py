"""Synthetic CT volumes with a contrast lumen and a sampled fat annulus."""

from collections.abc import Iterable
import logging

import numpy as np

from coronary.metrics.metrics import publish_coronary_metric
from coronary.miscellaneous.errors import PhantomSpecError
from coronary.analysis.pcat.actions import VoxelGrid, VoxelVolume, BinaryMask, PcatConstants, \
    tube_mask, VOLUME_DTYPE
from .constants import PhantomConstants
from .spec import ground_truth

logger = logging.getLogger(__name__)


def _as_rois(roi):
    if isinstance(roi, Iterable):
        return list(roi)
    return [roi]


def fit_grid(grid_spec, paths):
    """Axis-aligned grid covering tube paths with a margin.

    :param grid_spec: GridSpec; used as is when dims are given
    :param paths: list of (points, radius)
    :return: VoxelGrid

    """

    spacing = np.broadcast_to(np.asarray(grid_spec.spacing, dtype=float), (3,))
    if grid_spec.dims is not None:
        origin = (0.0, 0.0, 0.0) if grid_spec.origin is None else grid_spec.origin
        return VoxelGrid(grid_spec.dims, spacing, origin)
    low = np.min([np.min(points - radius[:, None], axis=0) for points, radius in paths], axis=0)
    high = np.max([np.max(points + radius[:, None], axis=0) for points, radius in paths], axis=0)
    low = low - PhantomConstants.GRID_MARGIN_MM
    high = high + PhantomConstants.GRID_MARGIN_MM
    origin = low if grid_spec.origin is None else np.asarray(grid_spec.origin, dtype=float)
    dims = np.ceil((high - origin) / spacing).astype(int) + 1
    return VoxelGrid(dims, spacing, origin)


def _multiset(values):
    hu, counts = np.unique(values, return_counts=True)
    return [[int(h), int(c)] for h, c in zip(hu, counts)]


def gen_pcat_volume(spec, roi, lumen_paths=None, jobs=1):
    """HU volume and lumen mask around one or more tube ROIs.

    Lumen voxels are set to the contrast value, voxels of the ROI tubes
    outside the lumen are drawn from the spec's HU sampler and every
    other voxel holds the background value. The truth lists, per ROI,
    the exact multiset of in-window HU values inside the ROI.

    :param spec: PhantomSpec (seed, grid, hu_sampler)
    :param roi: TubeROI or list of TubeROI
    :param lumen_paths: optional list of (points, radius) lumen tubes;
                        defaults to the ROIs' own lumen radius
    :param jobs: rasterization threads
    :return: (VoxelVolume, BinaryMask lumen, GroundTruth)
    :raises PhantomSpecError: an ROI does not reach the grid

    """

    publish_coronary_metric('analysis.phantom.gen_pcat_volume')
    rois = _as_rois(roi)
    if lumen_paths is None:
        lumen_paths = [(r.points, r.lumen_radius) for r in rois]
    lumen_paths = [(np.asarray(p, dtype=float), np.asarray(r, dtype=float))
                   for p, r in lumen_paths]
    grid = fit_grid(spec.grid, [(r.points, r.outer_radius) for r in rois])

    flags = []
    if np.any(grid.spacing > PhantomConstants.COARSE_SPACING_MM):
        flags.append('coarse_grid')
        logger.warning('phantom grid spacing {} mm is coarser than {} mm'.format(
            grid.spacing.tolist(), PhantomConstants.COARSE_SPACING_MM))

    lumen = np.zeros(grid.dims, dtype=bool)
    for points, radius in lumen_paths:
        selected = tube_mask(points, radius, grid, jobs)
        if selected is not None:
            lumen |= selected

    tubes = []
    annulus = np.zeros(grid.dims, dtype=bool)
    for r in rois:
        selected = tube_mask(r.points, r.outer_radius, grid, jobs)
        if selected is None:
            raise PhantomSpecError('{} ROI lies outside the phantom grid'.format(r.branch or 'tube'))
        selected &= ~lumen
        tubes.append(selected)
        annulus |= selected

    rng = np.random.default_rng(spec.seed)
    data = np.full(grid.dims, PhantomConstants.BACKGROUND_HU, dtype=np.int16)
    data[annulus] = spec.hu_sampler.sample(rng, int(annulus.sum()))
    data[lumen] = PhantomConstants.LUMEN_HU

    records = []
    for r, selected in zip(rois, tubes):
        values = data[selected]
        fat = values[(values >= PcatConstants.HU_MIN) & (values <= PcatConstants.HU_MAX)]
        fai = int(np.sum(fat, dtype=np.int64)) / fat.size if fat.size else None
        records.append(ground_truth(branch=r.branch, lesion_id=r.lesion_id,
                                    roi_voxels=int(selected.sum()), fat_voxels=int(fat.size),
                                    fai=fai, hu_multiset=_multiset(fat)))
    truth = ground_truth(grid=grid.header(VOLUME_DTYPE), lumen_voxels=int(lumen.sum()),
                         annulus_voxels=int(annulus.sum()), rois=records, flags=flags,
                         spec=spec.as_dict())
    logger.debug('phantom volume {}: {} lumen / {} annulus voxels'.format(
        grid.dims, truth.lumen_voxels, truth.annulus_voxels))
    return VoxelVolume(grid, data), BinaryMask(grid, lumen), truth
