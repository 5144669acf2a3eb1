"""Severe versus non-severe comparisons of lesion features."""

import collections
import logging

import numpy as np

from coronary.miscellaneous.errors import DegenerateSampleError, MissingFeatureError
from coronary.metrics.metrics import publish_coronary_metric
from coronary.analysis.classifier.actions import Criterion, label_lesions
from .constants import StatsConstants
from .hypothesis import shapiro_wilk, students_t, mann_whitney_u

logger = logging.getLogger(__name__)

GroupComparison = collections.namedtuple(
    'GroupComparison', ['feature', 'normality', 'test', 'summaries', 'flags'])


def describe(values, normal):
    """Mean and standard deviation of a normal group, median and quartiles otherwise."""
    values = np.asarray(values, dtype=float)
    if normal:
        return {'n': len(values), 'mean': float(np.mean(values)),
                'std': float(np.std(values, ddof=1)) if len(values) > 1 else 0.0}
    q1, median, q3 = np.percentile(values, (25, 50, 75))
    return {'n': len(values), 'median': float(median), 'q1': float(q1), 'q3': float(q3)}


def compare_groups(sample1, sample2, feature='', alpha=StatsConstants.ALPHA):
    """Compare two groups with the test their normality calls for.

    Both groups passing Shapiro-Wilk at alpha select Student's t test,
    otherwise the Mann-Whitney U test is used. A group too small or
    constant for Shapiro-Wilk counts as non-normal and is flagged.

    :param sample1: values of the first (severe) group
    :param sample2: values of the second group
    :param feature: feature name for reports
    :param alpha: normality significance level
    :return: GroupComparison

    """

    publish_coronary_metric('analysis.stats.compare_groups')
    flags = []
    normality = []
    for name, sample in (('group1', sample1), ('group2', sample2)):
        try:
            normality.append(shapiro_wilk(sample))
        except DegenerateSampleError as error:
            flags.append('{}_normality_untested'.format(name))
            logger.warning('{} {}: {}'.format(feature, name, error))
            normality.append(None)
    normal = all(result is not None and result.p_value >= alpha for result in normality)
    test = None
    if normal:
        try:
            test = students_t(sample1, sample2)
        except DegenerateSampleError as error:
            flags.append('t_test_degenerate')
            logger.warning('{}: {}'.format(feature, error))
    if test is None:
        test = mann_whitney_u(sample1, sample2)
    summaries = [describe(sample1, normal), describe(sample2, normal)]
    logger.info('{}: {} p = {:.4g}'.format(feature, test.method.value, test.p_value))
    return GroupComparison(feature, normality, test, summaries, tuple(flags))


def stratify_by_criterion(table, criterion, feature):
    """Feature values of the severe and non-severe lesions of a criterion.

    :param table: FeatureTable with functional columns
    :param criterion: Criterion value
    :param feature: feature column
    :return: (severe values, non-severe values)

    """

    if feature not in table.frame.columns:
        raise MissingFeatureError('feature {} is not in the table'.format(feature))
    labels = label_lesions(table, Criterion(criterion))
    values = table.frame[feature].to_numpy(dtype=float)[labels.rows]
    keep = ~np.isnan(values)
    if not keep.all():
        logger.warning('{}: {} lesion(s) without a value skipped'.format(feature, int((~keep).sum())))
    return values[keep & (labels.values == 1)], values[keep & (labels.values == 0)]


def comparison_summary(comparison, alpha=StatsConstants.ALPHA):
    normality = [None if result is None else
                 {'W': result.statistic, 'p': result.p_value,
                  'normal': result.p_value >= alpha} for result in comparison.normality]
    return {
        'feature': comparison.feature,
        'normality': normality,
        'test': comparison.test.method.value,
        'statistic': comparison.test.statistic,
        'p': comparison.test.p_value,
        'n1': comparison.test.n1,
        'n2': comparison.test.n2,
        'groups': comparison.summaries,
        'flags': list(comparison.flags),
    }
