from .constants import Stage, PIPELINE_STAGES, INPUT_FILES, OUTPUT_FILES, VOLUME_INPUTS, \
    COHORT_FILES
from .stages import StageResult, provenance, provenance_header, input_path, load_case_trees, \
    stage_classify, stage_stenosis, stage_pcat, stage_features, stage_metrics
from .factory import Factory, STAGE_MAP
from .runner import RunReport, run_pipeline, run_cases, run_cohort
