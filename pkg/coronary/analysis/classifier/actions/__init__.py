from .constants import Criterion, BranchSubset, ClassifierConstants, ID_COLUMNS, \
    FUNCTIONAL_COLUMNS, BRANCH_COLUMNS
from .table import FeatureTable, build_feature_table, MORPHOLOGY_COLUMNS, PCAT_FEATURE_COLUMNS
from .labels import LabelCriterion, LabelSet, Split, label_lesions, stratified_split
from .selection import RfeResult, rfe_select, zscore
from .mlp import TrainConfig, MlpModel, train_config, init_layers, forward, cross_entropy, \
    loss_and_gradients, train_mlp, predict, predict_frame
from .evaluation import Metrics, auc, evaluate
from .training import CriterionResult, candidate_features, train_criterion, result_summary, \
    metrics_report
