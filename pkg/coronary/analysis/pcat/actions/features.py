"""Adipose-window features of a pericoronary ROI."""

import collections
import logging

import numpy as np
import pandas as pd

from coronary.metrics.metrics import publish_coronary_metric
from .constants import PcatConstants, PCAT_COLUMNS, Scope
from .rasterize import rasterize_tube

logger = logging.getLogger(__name__)

_FEATURE_FIELDS = ['fai', 'p10', 'p25', 'p50', 'p75', 'p90', 'p95', 'fat_fraction',
                   'fat_volume_mm3', 'roi_voxels', 'fat_voxels']


class PcatFeatures(collections.namedtuple('PcatFeatures', _FEATURE_FIELDS)):
    """Fat attenuation features; fai and percentiles are None without fat voxels."""

    __slots__ = ()

    @property
    def inflamed(self):
        """FAI above the inflammation threshold; None without fat voxels."""
        if self.fai is None:
            return None
        return self.fai > PcatConstants.INFLAMMATION_HU

    @property
    def percentiles(self):
        return [self.p10, self.p25, self.p50, self.p75, self.p90, self.p95]


PcatRow = collections.namedtuple('PcatRow', ['scope', 'branch', 'lesion_id', 'features', 'flags'])


def fat_values(mask, volume, hu_min=PcatConstants.HU_MIN, hu_max=PcatConstants.HU_MAX):
    """HU values of the masked voxels inside the adipose window, inclusive."""
    volume.grid.check_same(mask.grid)
    values = volume.data[mask.data]
    return values[(values >= hu_min) & (values <= hu_max)]


def pcat_features(mask, volume, config=None):
    """Features of the adipose voxels selected by a mask.

    :param mask: BinaryMask on the volume grid
    :param volume: VoxelVolume
    :param config: optional Munch with a 'pcat' section (hu_min, hu_max)
    :return: PcatFeatures

    """

    publish_coronary_metric('analysis.pcat.pcat_features')
    settings = (config or {}).get('pcat', {})
    hu_min = settings.get('hu_min', PcatConstants.HU_MIN)
    hu_max = settings.get('hu_max', PcatConstants.HU_MAX)
    fat = fat_values(mask, volume, hu_min, hu_max)
    roi_voxels = mask.count
    fat_voxels = int(fat.size)
    fat_fraction = fat_voxels / roi_voxels if roi_voxels else 0.0
    fat_volume = fat_voxels * volume.grid.voxel_volume

    if not fat_voxels:
        logger.warning('no voxel of the {} voxel ROI in [{}, {}] HU'.format(
            roi_voxels, hu_min, hu_max))
        return PcatFeatures(None, None, None, None, None, None, None, fat_fraction,
                            fat_volume, roi_voxels, fat_voxels)

    fai = int(np.sum(fat, dtype=np.int64)) / fat_voxels
    percentiles = np.percentile(fat.astype(float), PcatConstants.PERCENTILES, method='linear')
    return PcatFeatures(fai, *(float(p) for p in percentiles), fat_fraction, fat_volume,
                        roi_voxels, fat_voxels)


def measure_roi(roi, volume, lumen, config=None, jobs=1, scope=None):
    """Rasterize an ROI and compute its features.

    :return: (BinaryMask, PcatRow)

    """

    mask = rasterize_tube(roi, volume, lumen, jobs)
    features = pcat_features(mask, volume, config)
    if scope is None:
        scope = Scope.LESION if roi.lesion_id else Scope.VESSEL
    row = PcatRow(Scope(scope), roi.branch, roi.lesion_id, features, roi.flags + mask.flags)
    logger.info('{} {} {}: FAI {} HU over {} fat voxels'.format(
        row.scope.value, roi.branch, roi.lesion_id or '',
        'n/a' if features.fai is None else '{:.1f}'.format(features.fai), features.fat_voxels))
    return mask, row


def pcat_frame(rows):
    records = []
    for row in rows:
        record = {'scope': Scope(row.scope).value, 'branch': row.branch, 'lesion_id': row.lesion_id}
        record.update(row.features._asdict())
        records.append(record)
    return pd.DataFrame(records, columns=PCAT_COLUMNS)


def write_pcat_csv(rows, path, header=None):
    """PCAT report, one row per vessel or lesion ROI.

    :param rows: list of PcatRow
    :param path: output CSV
    :param header: optional provenance comment written as the first line

    """

    with open(path, 'w') as fh:
        if header:
            fh.write('# {}\n'.format(header))
        pcat_frame(rows).to_csv(fh, index=False, float_format='%.17g', lineterminator='\n')


def read_pcat_csv(path):
    return pd.read_csv(path, comment='#')


def read_pcat_rows(path):
    """PcatRow list of a PCAT report; empty cells become None."""
    rows = []
    for record in read_pcat_csv(path).to_dict('records'):
        values = {name: (None if pd.isna(record[name]) else record[name])
                  for name in _FEATURE_FIELDS}
        for name in ('roi_voxels', 'fat_voxels'):
            values[name] = int(values[name])
        rows.append(PcatRow(Scope(record['scope']), str(record['branch']), int(record['lesion_id']),
                            PcatFeatures(**values), ()))
    return rows
