from .constants import LesionShape, TreeTemplate, LabelRule, PhantomConstants, SD_LEVELS, \
    FEATURE_SCALES
from .spec import LesionSpec, GridSpec, HuSampler, PhantomSpec, DatasetSpec, ground_truth, \
    lesion_support
from .profile import lesion_shape, lesion_crossing, baseline_radius, narrowing, \
    gen_radius_profile
from .tree import grow_path, rotate_toward, gen_coronary_tree
from .volume import fit_grid, gen_pcat_volume
from .dataset import gen_feature_dataset
from .cases import CASE_FILES, gen_case, write_case
