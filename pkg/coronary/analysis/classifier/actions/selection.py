"""Recursive feature elimination with a logistic regression estimator."""

import collections
import logging
import warnings

import numpy as np
from sklearn.exceptions import ConvergenceWarning
from sklearn.linear_model import LogisticRegression

from coronary.metrics.metrics import publish_coronary_metric
from .constants import ClassifierConstants

logger = logging.getLogger(__name__)

RfeResult = collections.namedtuple('RfeResult', ['selected', 'eliminated', 'coefficients', 'flags'])

_TIE_TOL = 1e-9


def zscore(values, mean=None, std=None):
    """Standardize columns; constant columns map to 0.

    :return: (scaled, mean, std) with std of constant columns set to 1

    """

    values = np.asarray(values, dtype=float)
    if mean is None:
        mean = values.mean(axis=0)
        std = values.std(axis=0)
        std = np.where(std > 0, std, 1.0)
    return (values - mean) / std, mean, std


def rfe_select(features, labels, names, k=ClassifierConstants.K_FEATURES,
               l2=ClassifierConstants.RFE_L2, max_iter=ClassifierConstants.RFE_MAX_ITER, seed=0):
    """Keep the k features a logistic regression relies on most.

    Columns are z-scored on the given (training) rows. The regression is
    refit after every elimination of the feature with the smallest
    absolute coefficient; near-equal coefficients drop the later column.

    :param features: (n, m) training matrix
    :param labels: (n,) binary labels
    :param names: m column names
    :param k: features to keep
    :param l2: L2 penalty strength (inverse of sklearn's C)
    :param max_iter: solver iteration cap
    :param seed: random state of the estimator
    :return: RfeResult with selected names in original column order,
             eliminated names in elimination order and the final
             coefficients

    """

    publish_coronary_metric('analysis.classifier.rfe_select')
    names = list(names)
    if k < 1 or k > len(names):
        raise ValueError('cannot select {} of {} features'.format(k, len(names)))
    scaled, _, _ = zscore(features)
    labels = np.asarray(labels, dtype=np.int64)

    remaining = list(range(len(names)))
    eliminated = []
    flags = []
    coefficients = np.zeros(len(names))
    while True:
        estimator = LogisticRegression(C=1.0 / l2, max_iter=max_iter, random_state=seed)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter('always', ConvergenceWarning)
            estimator.fit(scaled[:, remaining], labels)
        if any(issubclass(w.category, ConvergenceWarning) for w in caught) \
                and 'rfe_not_converged' not in flags:
            flags.append('rfe_not_converged')
            logger.warning('logistic regression hit {} iterations with {} features'.format(
                max_iter, len(remaining)))
        coefficients = np.abs(estimator.coef_[0])
        if len(remaining) <= k:
            break
        smallest = coefficients.min()
        tied = np.flatnonzero(coefficients <= smallest + _TIE_TOL * max(1.0, smallest))
        drop = remaining[int(tied[-1])]
        eliminated.append(names[drop])
        remaining.remove(drop)
    logger.info('RFE kept {}'.format([names[i] for i in remaining]))
    return RfeResult(selected=[names[i] for i in remaining], eliminated=eliminated,
                     coefficients=dict(zip((names[i] for i in remaining), coefficients.tolist())),
                     flags=tuple(flags))
