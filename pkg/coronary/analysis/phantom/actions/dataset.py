"""Synthetic lesion feature tables with a planted label rule."""

import logging

import numpy as np
import pandas as pd

from coronary.metrics.metrics import publish_coronary_metric
from coronary.miscellaneous.errors import PhantomSpecError
from coronary.analysis.classifier.actions import FeatureTable, ClassifierConstants, ID_COLUMNS, \
    BRANCH_COLUMNS, FUNCTIONAL_COLUMNS, MORPHOLOGY_COLUMNS, PCAT_FEATURE_COLUMNS
from .constants import FEATURE_SCALES, LabelRule
from .spec import ground_truth

logger = logging.getLogger(__name__)

BRANCHES = ('LAD', 'LCx', 'RCA')


def _functional(rng, labels):
    """vFFR, WSS and dFFR on the side of every cutoff given by the label."""
    n = len(labels)
    positive = labels.astype(bool)
    vffr = np.where(positive, rng.uniform(0.60, ClassifierConstants.VFFR_MAX, n),
                    rng.uniform(0.81, 0.99, n))
    wss = np.where(positive, rng.uniform(ClassifierConstants.WSS_MIN_PA, 30.0, n),
                   rng.uniform(2.0, 15.4, n))
    dffr = np.where(positive, rng.uniform(ClassifierConstants.DFFR_MIN, 0.20, n),
                    rng.uniform(0.0, 0.05, n))
    return vffr, wss, dffr


def gen_feature_dataset(spec):
    """Feature table whose labels follow a known rule.

    Every feature is loc + scale * z with z standard normal. The latent
    label is sign(w . z_signal + noise) for the linear rule, the
    exclusive or of the two signal signs for the xor rule and a fair
    coin for the noise rule. Functional columns are drawn on the side of
    every cutoff given by the latent label, so all four criteria
    reproduce it.

    :param spec: DatasetSpec
    :return: (FeatureTable, GroundTruth)

    """

    publish_coronary_metric('analysis.phantom.gen_feature_dataset')
    names = MORPHOLOGY_COLUMNS + PCAT_FEATURE_COLUMNS
    unknown = [name for name in spec.signal_features if name not in names]
    if unknown:
        raise PhantomSpecError('unknown signal feature(s) {}'.format(unknown))

    rng = np.random.default_rng(spec.seed)
    n = spec.rows
    z = rng.standard_normal((n, len(names)))
    signal = z[:, [names.index(name) for name in spec.signal_features]]
    noise = spec.noise * rng.standard_normal((n, len(spec.signal_features)))

    if spec.rule is LabelRule.LINEAR:
        labels = (signal @ np.asarray(spec.weights) + noise[:, 0] > 0).astype(np.int64)
    elif spec.rule is LabelRule.XOR:
        noisy = signal + noise
        labels = ((noisy[:, 0] > 0) != (noisy[:, 1] > 0)).astype(np.int64)
    else:
        labels = (rng.random(n) < 0.5).astype(np.int64)

    patients = np.concatenate([np.arange(spec.patients),
                               rng.integers(0, spec.patients, n - spec.patients)])
    patients = patients[rng.permutation(n)]
    branches = rng.integers(0, len(BRANCHES), n)
    vffr, wss, dffr = _functional(rng, labels)

    frame = pd.DataFrame({'patient': ['P{:04d}'.format(p) for p in patients],
                          'branch': [BRANCHES[b] for b in branches]})
    frame['lesion_id'] = frame.groupby('patient').cumcount() + 1
    for index, name in enumerate(names):
        loc, scale = FEATURE_SCALES[name]
        frame[name] = loc + scale * z[:, index]
    for column in BRANCH_COLUMNS:
        frame[column] = (frame['branch'] == column.split('_', 1)[1]).astype(float)
    frame['vffr'], frame['wss'], frame['dffr'] = vffr, wss, dffr
    frame = frame[ID_COLUMNS + names + BRANCH_COLUMNS + FUNCTIONAL_COLUMNS]

    truth = ground_truth(rule=spec.rule.value, signal_features=list(spec.signal_features),
                         weights=list(spec.weights), noise=spec.noise, labels=labels,
                         positives=int(labels.sum()), spec=spec.as_dict())
    logger.debug('dataset: {} rows, {} patients, {} positive'.format(
        n, spec.patients, truth.positives))
    return FeatureTable(frame), truth
