from .constants import StenosisConstants, LESION_COLUMNS
from .profile import RadiusProfile
from .regression import RegressionParams, RegressionIntermediates, StenosisProfile, \
    compute_kappa, healthy_radius, stenosis_degree, gaussian_kernel, validate_params, \
    default_bounds
from .optimization import PeakSet, OptimizationResult, RegressionObjective, detect_peaks, \
    regression_loss, optimize_params
from .lesions import Lesion, LesionInterval, VesselReport, detect_lesions, \
    lesion_morphometrics, analyze_vessel, regression_dump, write_regression_dump, \
    lesions_frame, write_lesions_csv, read_lesions_csv
