"""Two-sided hypothesis tests used to compare groups of lesions."""

import collections
import logging

import numpy as np
from scipy import stats

from coronary.miscellaneous.errors import DegenerateSampleError
from .constants import Method, StatsConstants

logger = logging.getLogger(__name__)

TestResult = collections.namedtuple('TestResult', ['statistic', 'p_value', 'n1', 'n2', 'method'])


def _sample(values, name='sample'):
    values = np.asarray(values, dtype=float).ravel()
    if not np.all(np.isfinite(values)):
        raise ValueError('{} holds non-finite values'.format(name))
    return values


def shapiro_wilk(sample):
    """Shapiro-Wilk normality test (Royston's approximation).

    :param sample: 3 to 5000 values
    :return: TestResult with W and its p value (n2 = 0)
    :raises DegenerateSampleError: fewer than 3 values or a constant sample

    """

    sample = _sample(sample)
    n = len(sample)
    if n < StatsConstants.SHAPIRO_MIN_N:
        raise DegenerateSampleError('Shapiro-Wilk needs at least 3 values, got {}'.format(n))
    if n > StatsConstants.SHAPIRO_MAX_N:
        raise ValueError('Shapiro-Wilk p values are unreliable above 5000 values, got {}'.format(n))
    if np.ptp(sample) == 0:
        raise DegenerateSampleError('constant sample')
    w, p = stats.shapiro(sample)
    return TestResult(float(w), float(p), n, 0, Method.SHAPIRO_WILK)


def students_t(sample1, sample2):
    """Two-sample pooled-variance t test.

    :return: TestResult with t (positive when sample1 has the larger mean)
    :raises DegenerateSampleError: a sample with fewer than 2 values or
            zero pooled variance

    """

    first, second = _sample(sample1, 'sample1'), _sample(sample2, 'sample2')
    n1, n2 = len(first), len(second)
    if n1 < 2 or n2 < 2:
        raise DegenerateSampleError('t test needs 2 values per sample, got {} and {}'.format(n1, n2))
    pooled = ((n1 - 1) * first.var(ddof=1) + (n2 - 1) * second.var(ddof=1)) / (n1 + n2 - 2)
    if pooled == 0:
        raise DegenerateSampleError('zero pooled variance')
    t, p = stats.ttest_ind(first, second, equal_var=True)
    return TestResult(float(t), float(min(max(p, 0.0), 1.0)), n1, n2, Method.STUDENT_T)


def mann_whitney_u(sample1, sample2):
    """Mann-Whitney U test on midranks.

    The p value is exact, by the full null distribution, when the pooled
    size is at most 16 without ties; otherwise the normal approximation
    with tie and continuity corrections is used.

    :return: TestResult with U of sample1 (pairs where sample1 is larger,
             ties counting one half)

    """

    first, second = _sample(sample1, 'sample1'), _sample(sample2, 'sample2')
    n1, n2 = len(first), len(second)
    if not n1 or not n2:
        raise DegenerateSampleError('Mann-Whitney needs non-empty samples')
    pooled = np.concatenate([first, second])
    ties = len(np.unique(pooled)) < len(pooled)
    if n1 + n2 <= StatsConstants.EXACT_MAX_N and not ties:
        method = Method.MANN_WHITNEY_EXACT
        result = stats.mannwhitneyu(first, second, alternative='two-sided', method='exact')
    else:
        method = Method.MANN_WHITNEY_ASYMPTOTIC
        if np.ptp(pooled) == 0:
            # every pair tied: U sits at its mean and no ranking information is left
            return TestResult(n1 * n2 / 2.0, 1.0, n1, n2, method)
        result = stats.mannwhitneyu(first, second, alternative='two-sided', method='asymptotic',
                                    use_continuity=True)
    p = float(min(max(result.pvalue, 0.0), 1.0))
    return TestResult(float(result.statistic), p, n1, n2, method)
