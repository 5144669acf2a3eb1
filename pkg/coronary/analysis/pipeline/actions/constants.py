"""Pipeline Constants."""

from enum import Enum


class Stage(Enum):
    CLASSIFY = 'classify'
    STENOSIS = 'stenosis'
    PCAT = 'pcat'
    FEATURES = 'features'
    METRICS = 'metrics'


# run order; every stage reads the files written by the ones before it
PIPELINE_STAGES = (Stage.CLASSIFY, Stage.STENOSIS, Stage.PCAT, Stage.FEATURES, Stage.METRICS)

INPUT_FILES = {
    'left': 'centerlines_left.json',
    'right': 'centerlines_right.json',
    'ct': 'ct',
    'lumen': 'lumen',
    'functional': 'functional.csv',
}

OUTPUT_FILES = {
    'classification': 'classification.json',
    'lesions': 'lesions.csv',
    'regression': 'regression.json',
    'pcat': 'pcat.csv',
    'features': 'features.csv',
    'metrics': 'metrics.json',
    'summary': 'summary.json',
}

SIDES = ('right', 'left')

# base names of NAME.vol.json + NAME.vol.raw pairs
VOLUME_INPUTS = ('ct', 'lumen')

LOG_FORMAT = '%(asctime)s : %(levelname)s : %(name)s : %(message)s'

# pooled outputs of a multi-case run
COHORT_FILES = {
    'features': 'cohort_features.csv',
    'metrics': 'cohort_metrics.json',
}
