"""Phantom Constants."""

from enum import Enum


class LesionShape(Enum):
    GAUSSIAN = 'gaussian'
    COSINE = 'cosine'


class TreeTemplate(Enum):
    RIGHT_DOMINANT = 'right_dominant'
    LEFT_DOMINANT = 'left_dominant'
    CODOMINANT = 'codominant'
    LEFT = 'left'
    LEFT_AMBIGUOUS = 'left_ambiguous'


class LabelRule(Enum):
    LINEAR = 'linear'
    XOR = 'xor'
    NOISE = 'noise'


class PhantomConstants(object):
    LUMEN_HU = 300
    BACKGROUND_HU = 50
    HU_RANGE = (-1024, 3071)
    MIN_LESION_WIDTH_MM = 2.0
    PROFILE_SPACING_MM = 0.5
    TREE_SPACING_MM = 0.4
    RIPPLE_PERIOD_MM = 12.0
    COARSE_SPACING_MM = 1.0
    GRID_MARGIN_MM = 2.0
    # in-window default sampler, two fat populations
    FAT_HU_VALUES = (-110, -95, -80, -65)
    FAT_HU_WEIGHTS = (0.2, 0.3, 0.3, 0.2)


SD_LEVELS = (0.10, 0.20)

# plausible location and spread of each synthetic feature
FEATURE_SCALES = {
    'max_sd': (0.40, 0.12),
    'length_mm': (9.0, 4.0),
    'mla_mm2': (3.5, 1.2),
    'dist_ostium_mm': (35.0, 15.0),
    'tortuosity': (0.93, 0.04),
    'fai': (-85.0, 9.0),
    'p10': (-150.0, 12.0),
    'p25': (-118.0, 10.0),
    'p50': (-88.0, 9.0),
    'p75': (-62.0, 8.0),
    'p90': (-45.0, 6.0),
    'p95': (-38.0, 4.0),
    'fat_fraction': (0.55, 0.12),
    'fat_volume_mm3': (900.0, 250.0),
}
