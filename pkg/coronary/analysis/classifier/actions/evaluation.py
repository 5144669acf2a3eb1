"""Classification metrics."""

import collections
import logging

import numpy as np
from scipy.stats import rankdata
from sklearn.metrics import accuracy_score, f1_score

from .constants import ClassifierConstants

logger = logging.getLogger(__name__)

Metrics = collections.namedtuple(
    'Metrics', ['loss_mean', 'loss_std', 'f1', 'accuracy', 'auc', 'n', 'flags'])


def auc(scores, labels):
    """Probability that a positive outranks a negative, ties counting one half.

    Computed from midranks of the pooled scores.

    :return: float, or None when a class is absent

    """

    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=np.int64)
    positives = int(np.sum(labels == 1))
    negatives = len(labels) - positives
    if not positives or not negatives:
        return None
    ranks = rankdata(scores, method='average')
    u = float(np.sum(ranks[labels == 1])) - positives * (positives + 1) / 2.0
    return u / (positives * negatives)


def evaluate(probabilities, labels, threshold=ClassifierConstants.THRESHOLD):
    """Loss, F1, accuracy and AUC of predicted probabilities.

    :param probabilities: (n,) predicted probabilities
    :param labels: (n,) binary labels
    :param threshold: class 1 iff p >= threshold
    :return: Metrics; auc None and flagged 'auc_undefined' for single-class labels

    """

    probabilities = np.asarray(probabilities, dtype=float)
    labels = np.asarray(labels, dtype=np.int64)
    if probabilities.shape != labels.shape:
        raise ValueError('{} probabilities for {} labels'.format(len(probabilities), len(labels)))
    if not len(labels):
        raise ValueError('nothing to evaluate')
    flags = []
    predicted = (probabilities >= threshold).astype(np.int64)
    clipped = np.clip(probabilities, ClassifierConstants.LOSS_CLIP, 1.0 - ClassifierConstants.LOSS_CLIP)
    losses = -(labels * np.log(clipped) + (1 - labels) * np.log(1.0 - clipped))
    area = auc(probabilities, labels)
    if area is None:
        flags.append('auc_undefined')
        logger.warning('AUC undefined for {} single-class labels'.format(len(labels)))
    return Metrics(loss_mean=float(losses.mean()), loss_std=float(losses.std()),
                   f1=float(f1_score(labels, predicted, zero_division=0)),
                   accuracy=float(accuracy_score(labels, predicted)),
                   auc=area, n=len(labels), flags=tuple(flags))
