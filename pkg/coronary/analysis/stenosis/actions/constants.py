"""Stenosis Constants."""


class StenosisConstants:
    RESAMPLE_MM = 0.5
    MIN_POINTS = 5
    SIGMA_X_BOUNDS = (10.0, 17.5)
    SIGMA_MAX_BOUNDS = (3.67, 50.0)
    SIGMA_R_BOUNDS = (0.25, 0.556)
    GRID_POINTS = 8
    GRADIENT_STEP_FRACTION = 1e-3
    SD_CORE = 0.20
    SD_EXTEND = 0.10
    FILTER_DIAMETERS = 2.5
    MIN_LENGTH_MM = 2.0
    PEAK_DISTANCE_DIAMETERS = 2.5
    PEAK_PROMINENCE_FRACTION = 0.25


LESION_COLUMNS = ['branch', 'lesion_id', 'start_mm', 'end_mm', 'max_sd', 'length_mm',
                  'mla_mm2', 'dist_ostium_mm', 'tortuosity']
