"""Per-criterion training: label, split, select, train and evaluate."""

import collections
import logging
from concurrent.futures import ThreadPoolExecutor

from coronary.miscellaneous.errors import CoronaryError
from coronary.metrics.metrics import publish_coronary_metric
from .constants import BranchSubset, Criterion, BRANCH_COLUMNS
from .evaluation import evaluate
from .labels import label_lesions, stratified_split
from .mlp import train_mlp, train_config
from .selection import rfe_select

logger = logging.getLogger(__name__)

CriterionResult = collections.namedtuple(
    'CriterionResult',
    ['criterion', 'subset', 'selected', 'model', 'metrics', 'sizes', 'flags'])


def candidate_features(table, subset):
    """Feature columns usable for a branch subset (one-hot columns only when pooled)."""
    columns = table.feature_columns
    if BranchSubset(subset) is not BranchSubset.ALL:
        columns = [column for column in columns if column not in BRANCH_COLUMNS]
    return columns


def train_criterion(table, criterion, subset=BranchSubset.ALL, config=None, seed=None):
    """Train and evaluate one (branch subset, criterion) classifier.

    :param table: FeatureTable with functional columns
    :param criterion: Criterion value
    :param subset: BranchSubset value
    :param config: optional pipeline Munch ([classifier], [pipeline] seed)
    :param seed: overrides the configured seed
    :return: CriterionResult
    :raises SplitError: a class is absent in the subset

    """

    publish_coronary_metric('analysis.classifier.train_criterion')
    criterion, subset = Criterion(criterion), BranchSubset(subset)
    settings = train_config(config, seed)
    table = table.subset(subset)
    features = candidate_features(table, subset)
    flags = []

    complete = table.complete_rows(features)
    if len(complete) < len(table):
        flags.append('rows_with_missing_features')
        logger.warning('{}/{}: {} row(s) with missing features skipped'.format(
            subset.value, criterion.value, len(table) - len(complete)))
    labels = label_lesions(table, criterion)
    complete = set(complete.tolist())
    keep = [i for i, row in enumerate(labels.rows) if row in complete]
    rows = labels.rows[keep]
    values = labels.values[keep]
    if labels.excluded:
        flags.append('rows_without_functional_values')

    split = stratified_split(table.patients[rows], values, settings.seed, settings.split, criterion)
    matrix = table.matrix(features, rows)
    k = min(settings.k_features, len(features))
    selection = rfe_select(matrix[split.train], values[split.train], features, k,
                           seed=settings.seed)
    flags.extend(selection.flags)
    columns = [features.index(name) for name in selection.selected]
    model = train_mlp((matrix[split.train][:, columns], values[split.train]),
                      (matrix[split.val][:, columns], values[split.val]),
                      settings, selection.selected)
    metrics = evaluate(model.predict_proba(matrix[split.test][:, columns]), values[split.test])
    flags.extend(metrics.flags)
    logger.info('{}/{}: F1 {:.2f}, accuracy {:.2f}, AUC {}'.format(
        subset.value, criterion.value, metrics.f1, metrics.accuracy,
        'n/a' if metrics.auc is None else '{:.2f}'.format(metrics.auc)))
    sizes = {'train': len(split.train), 'val': len(split.val), 'test': len(split.test)}
    return CriterionResult(criterion, subset, selection.selected, model, metrics, sizes,
                           tuple(flags))


def result_summary(result):
    metrics = result.metrics._asdict()
    return {
        'criterion': result.criterion.value,
        'subset': result.subset.value,
        'selected_features': result.selected,
        'sizes': result.sizes,
        'metrics': metrics,
        'best_epoch': result.model.history.get('best_epoch'),
        'flags': list(result.flags),
    }


def metrics_report(table, config=None, seed=None, jobs=1, subsets=tuple(BranchSubset),
                   criteria=tuple(Criterion)):
    """Metrics of every (branch subset, criterion) pair.

    Pairs are independent and may run on several threads; a pair that
    cannot be trained is reported with its error instead of aborting
    the report.

    :return: (report dict keyed '<subset>/<criterion>', list of CriterionResult)

    """

    pairs = [(BranchSubset(s), Criterion(c)) for s in subsets for c in criteria]

    def run(pair):
        subset, criterion = pair
        try:
            return train_criterion(table, criterion, subset, config, seed)
        except (CoronaryError, ValueError) as error:
            logger.warning('{}/{}: {}'.format(subset.value, criterion.value, error))
            return error

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            outcomes = list(executor.map(run, pairs))
    else:
        outcomes = [run(pair) for pair in pairs]

    report, results = {}, []
    for (subset, criterion), outcome in zip(pairs, outcomes):
        key = '{}/{}'.format(subset.value, criterion.value)
        if isinstance(outcome, Exception):
            report[key] = {'criterion': criterion.value, 'subset': subset.value,
                           'error': str(outcome)}
        else:
            report[key] = result_summary(outcome)
            results.append(outcome)
    return report, results
