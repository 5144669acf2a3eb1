"""Voxelization of tube ROIs against a lumen mask."""

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from coronary.metrics.metrics import publish_coronary_metric
from .constants import PcatConstants
from .volume import BinaryMask

logger = logging.getLogger(__name__)


def _unit(vector):
    norm = np.linalg.norm(vector)
    return vector / norm if norm > 0 else vector


class _TubeGeometry:
    """Tube path in the origin-relative frame of a grid, with per-segment index boxes."""

    def __init__(self, points, radius, grid):
        self.grid = grid
        self.points = np.asarray(points, dtype=float) - grid.origin
        self.radius = np.asarray(radius, dtype=float)
        index = grid.continuous_index(self.points)
        reach = self.radius[:, None] / grid.spacing
        lower = np.floor(np.minimum(index[:-1] - reach[:-1], index[1:] - reach[1:]))
        upper = np.ceil(np.maximum(index[:-1] + reach[:-1], index[1:] + reach[1:]))
        dims = np.array(grid.dims)
        self.lower = np.clip(lower, 0, dims - 1).astype(int)
        self.upper = np.clip(upper, -1, dims - 1).astype(int)
        # boxes entirely outside the grid end up with upper < lower after clipping
        self.visible = np.all((upper >= 0) & (lower <= dims - 1), axis=1)
        self.head = self.points[0]
        self.tail = self.points[-1]
        self.head_tangent = _unit(self.points[1] - self.points[0])
        self.tail_tangent = _unit(self.points[-1] - self.points[-2])

    def inside(self, segment, relative):
        """Centers within the segment's interpolated radius and between the end planes."""
        a, b = self.points[segment], self.points[segment + 1]
        ra, rb = self.radius[segment], self.radius[segment + 1]
        axis = b - a
        length2 = float(axis @ axis)
        if length2 > 0:
            t = np.clip((relative - a) @ axis / length2, 0.0, 1.0)
        else:
            t = np.zeros(len(relative))
        closest = a + t[:, None] * axis
        distance2 = np.sum((relative - closest) ** 2, axis=1)
        radius = ra + t * (rb - ra)
        return ((distance2 <= radius ** 2)
                & ((relative - self.head) @ self.head_tangent >= 0)
                & ((relative - self.tail) @ self.tail_tangent <= 0))

    def rasterize_slab(self, k_start, k_stop):
        nx, ny, _ = self.grid.dims
        selected = np.zeros((nx, ny, k_stop - k_start), dtype=bool)
        for segment in np.flatnonzero(self.visible):
            lo, hi = self.lower[segment], self.upper[segment]
            k_lo, k_hi = max(lo[2], k_start), min(hi[2], k_stop - 1)
            if k_lo > k_hi:
                continue
            i, j, k = np.mgrid[lo[0]:hi[0] + 1, lo[1]:hi[1] + 1, k_lo:k_hi + 1]
            ijk = np.column_stack([i.ravel(), j.ravel(), k.ravel()])
            hits = self.inside(segment, self.grid.relative_position(ijk))
            ijk = ijk[hits]
            selected[ijk[:, 0], ijk[:, 1], ijk[:, 2] - k_start] = True
        return selected


def tube_mask(points, radius, grid, jobs=1, slab_planes=PcatConstants.SLAB_PLANES):
    """Voxels whose centers lie inside a tube around a polyline.

    A center is inside when it lies within the linearly interpolated
    radius of some path segment and on the inner side of the planes
    normal to the path at both ends. The grid is split into slabs along
    the slowest axis; slabs may run on several threads and are joined
    in order.

    :param points: (m, 3) path positions, mm
    :param radius: (m,) tube radius per path point, mm
    :param grid: VoxelGrid
    :param jobs: worker threads
    :param slab_planes: k planes per slab
    :return: boolean array shaped like the grid, or None when no segment
             reaches the grid

    """

    tube = _TubeGeometry(points, radius, grid)
    if not np.any(tube.visible):
        return None
    nz = grid.dims[2]
    slabs = [(start, min(start + slab_planes, nz)) for start in range(0, nz, slab_planes)]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            parts = list(executor.map(lambda slab: tube.rasterize_slab(*slab), slabs))
    else:
        parts = [tube.rasterize_slab(*slab) for slab in slabs]
    return np.concatenate(parts, axis=2)


def rasterize_tube(roi, volume, lumen, jobs=1, slab_planes=PcatConstants.SLAB_PLANES):
    """Binary mask of the voxels inside a tube ROI and outside the lumen.

    :param roi: TubeROI
    :param volume: VoxelVolume providing the grid
    :param lumen: BinaryMask on the same grid
    :param jobs: worker threads
    :param slab_planes: k planes per slab
    :return: BinaryMask, flagged 'roi_outside_volume' when the tube misses
             the grid and 'roi_empty' when nothing is left outside the lumen
    :raises GridMismatchError: lumen mask on another grid

    """

    publish_coronary_metric('analysis.pcat.rasterize_tube')
    grid = volume.grid
    grid.check_same(lumen.grid, 'lumen mask')
    selected = tube_mask(roi.points, roi.outer_radius, grid, jobs, slab_planes)
    if selected is None:
        logger.warning('{} ROI lies outside the volume'.format(roi.branch or 'tube'))
        return BinaryMask.empty(grid, ('roi_outside_volume',))

    selected &= ~lumen.data
    flags = ()
    if not selected.any():
        flags = ('roi_empty',)
        logger.warning('{} ROI selects no voxel outside the lumen'.format(roi.branch or 'tube'))
    logger.debug('{} ROI: {} voxels'.format(roi.branch or 'tube', int(selected.sum())))
    return BinaryMask(grid, selected, flags)
