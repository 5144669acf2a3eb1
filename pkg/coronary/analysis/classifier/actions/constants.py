"""Classifier Constants."""

from enum import Enum

from coronary.miscellaneous.settings import get_setting, CLASSIFIER


class Criterion(Enum):
    FFR = 'FFR'
    WSS = 'WSS'
    DFFR = 'DFFR'
    HRS = 'HRS'


class BranchSubset(Enum):
    LAD = 'LAD'
    LCX = 'LCx'
    RCA = 'RCA'
    ALL = 'All'


class ClassifierConstants(object):
    VFFR_MAX = 0.80
    WSS_MIN_PA = 15.47
    DFFR_MIN = 0.06
    HRS_MIN_POSITIVE = 2
    EPOCHS = get_setting(CLASSIFIER, 'epochs', 300)
    LR0 = get_setting(CLASSIFIER, 'lr0', 0.001)
    DECAY = get_setting(CLASSIFIER, 'decay', 0.99)
    HIDDEN_LAYERS = get_setting(CLASSIFIER, 'hidden_layers', 4)
    WIDTH = get_setting(CLASSIFIER, 'width', 128)
    SPLIT = get_setting(CLASSIFIER, 'split', (0.8, 0.1, 0.1))
    K_FEATURES = get_setting(CLASSIFIER, 'k_features', 7)
    RFE_L2 = get_setting(CLASSIFIER, 'rfe_l2', 1.0)
    RFE_MAX_ITER = get_setting(CLASSIFIER, 'rfe_max_iter', 5000)
    MIN_ROWS_PER_CLASS = get_setting(CLASSIFIER, 'min_rows_per_class', 10)
    ADAM_BETA1 = 0.9
    ADAM_BETA2 = 0.999
    ADAM_EPS = 1e-8
    THRESHOLD = 0.5
    LOSS_CLIP = 1e-12


ID_COLUMNS = ['patient', 'branch', 'lesion_id']
FUNCTIONAL_COLUMNS = ['vffr', 'wss', 'dffr']
BRANCH_COLUMNS = ['branch_LAD', 'branch_LCx', 'branch_RCA']
