from .constants import PcatConstants, RoiKind, Scope, PCAT_COLUMNS, VOLUME_DTYPE, MASK_DTYPE
from .volume import VoxelGrid, VoxelVolume, BinaryMask, load_volume, save_volume, \
    load_mask, save_mask, volume_paths
from .roi import TubeROI, vessel_roi, lesion_roi
from .rasterize import rasterize_tube, tube_mask
from .features import PcatFeatures, PcatRow, fat_values, pcat_features, measure_roi, \
    pcat_frame, write_pcat_csv, read_pcat_csv, read_pcat_rows
