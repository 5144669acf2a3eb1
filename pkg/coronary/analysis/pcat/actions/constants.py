"""PCAT Constants."""

from enum import Enum

from coronary.miscellaneous.settings import get_setting, PCAT


class RoiKind(Enum):
    PER_VESSEL = 'per_vessel'
    PER_LESION = 'per_lesion'


class Scope(Enum):
    VESSEL = 'vessel'
    LESION = 'lesion'


class PcatConstants(object):
    HU_MIN = get_setting(PCAT, 'hu_min', -190)
    HU_MAX = get_setting(PCAT, 'hu_max', -30)
    ROI_LENGTH_MM = get_setting(PCAT, 'roi_length_mm', 40.0)
    RADIUS_FACTOR = get_setting(PCAT, 'radius_factor', 3.0)
    INFLAMMATION_HU = get_setting(PCAT, 'inflammation_hu', -70.0)
    START_MM = {
        'RCA': get_setting(PCAT, 'rca_start_mm', 10.0),
        'LAD': get_setting(PCAT, 'lad_start_mm', 10.0),
        'LCx': get_setting(PCAT, 'lcx_start_mm', 0.0),
    }
    PERCENTILES = (10, 25, 50, 75, 90, 95)
    ORTHONORMAL_TOL = 1e-6
    SLAB_PLANES = 16


VOLUME_DTYPE = 'int16-le'
MASK_DTYPE = 'uint8'
VOXEL_ORDER = 'x-fastest'

PCAT_COLUMNS = ['scope', 'branch', 'lesion_id', 'fai', 'p10', 'p25', 'p50', 'p75', 'p90', 'p95',
                'fat_fraction', 'fat_volume_mm3', 'roi_voxels', 'fat_voxels']
