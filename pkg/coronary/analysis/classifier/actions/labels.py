"""Functional labelling of lesions and patient-grouped stratified splits."""

import collections
import logging

import numpy as np

from coronary.miscellaneous.errors import SplitError
from coronary.metrics.metrics import publish_coronary_metric
from .constants import Criterion, ClassifierConstants, FUNCTIONAL_COLUMNS

logger = logging.getLogger(__name__)

LabelSet = collections.namedtuple('LabelSet', ['criterion', 'values', 'rows', 'excluded'])

Split = collections.namedtuple('Split', ['train', 'val', 'test'])


class LabelCriterion:
    """Severity rule of one functional biomarker, or the high-risk combination."""

    def __init__(self, kind):
        self.kind = Criterion(kind)
        self.vffr_max = ClassifierConstants.VFFR_MAX
        self.wss_min = ClassifierConstants.WSS_MIN_PA
        self.dffr_min = ClassifierConstants.DFFR_MIN
        self.hrs_min = ClassifierConstants.HRS_MIN_POSITIVE

    def __repr__(self):
        return 'LabelCriterion({})'.format(self.kind.value)

    @property
    def columns(self):
        if self.kind is Criterion.HRS:
            return list(FUNCTIONAL_COLUMNS)
        return [{Criterion.FFR: 'vffr', Criterion.WSS: 'wss', Criterion.DFFR: 'dffr'}[self.kind]]

    def apply(self, vffr, wss, dffr):
        """Binary labels from functional values (arrays of equal length)."""
        ffr = np.asarray(vffr, dtype=float) <= self.vffr_max
        high_wss = np.asarray(wss, dtype=float) >= self.wss_min
        drop = np.asarray(dffr, dtype=float) >= self.dffr_min
        if self.kind is Criterion.FFR:
            positive = ffr
        elif self.kind is Criterion.WSS:
            positive = high_wss
        elif self.kind is Criterion.DFFR:
            positive = drop
        else:
            positive = ffr.astype(int) + high_wss.astype(int) + drop.astype(int) >= self.hrs_min
        return positive.astype(np.int64)


def label_lesions(table, criterion):
    """Label the rows of a feature table.

    :param table: FeatureTable with functional columns
    :param criterion: LabelCriterion or Criterion value
    :return: LabelSet; rows missing a needed functional value are excluded
             and listed in excluded

    """

    publish_coronary_metric('analysis.classifier.label_lesions')
    if not isinstance(criterion, LabelCriterion):
        criterion = LabelCriterion(criterion)
    missing = [column for column in criterion.columns if column not in table.frame.columns]
    if missing:
        raise ValueError('functional column(s) {} missing for {}'.format(
            missing, criterion.kind.value))
    frame = table.frame
    complete = ~frame[criterion.columns].isna().any(axis=1).to_numpy()
    rows = np.flatnonzero(complete)
    excluded = tuple(int(i) for i in np.flatnonzero(~complete))
    if excluded:
        logger.warning('{}: {} row(s) without functional values excluded: {}'.format(
            criterion.kind.value, len(excluded), list(excluded)))

    def column(name):
        if name in frame.columns:
            return frame[name].to_numpy(dtype=float)[rows]
        return np.full(len(rows), np.nan)

    values = criterion.apply(column('vffr'), column('wss'), column('dffr'))
    logger.debug('{}: {} positive of {}'.format(criterion.kind.value, int(values.sum()), len(values)))
    return LabelSet(criterion.kind, values, rows, excluded)


def stratified_split(patients, labels, seed, ratios=ClassifierConstants.SPLIT, criterion=None):
    """Class-proportional train/val/test split keeping each patient in one part.

    Patients are visited in a seeded random order, largest first, and
    each goes to the part whose remaining per-class quota best matches
    the patient's lesions.

    :param patients: patient id per labelled row
    :param labels: binary label per row
    :param seed: random seed
    :param ratios: (train, val, test) fractions summing to 1
    :param criterion: criterion name used in messages
    :return: Split of sorted row positions
    :raises SplitError: a class is absent

    """

    publish_coronary_metric('analysis.classifier.stratified_split')
    patients = np.asarray(patients).astype(str)
    labels = np.asarray(labels, dtype=np.int64)
    ratios = np.asarray(ratios, dtype=float)
    name = getattr(criterion, 'value', criterion) or 'labels'
    if len(ratios) != 3 or np.any(ratios < 0) or abs(ratios.sum() - 1.0) > 1e-9:
        raise ValueError('split ratios must be three fractions summing to 1, got {}'.format(ratios))
    counts = np.array([np.sum(labels == 0), np.sum(labels == 1)])
    if np.any(counts == 0):
        raise SplitError('{}: class {} is absent from {} rows'.format(
            name, int(np.argmin(counts)), len(labels)))
    if np.any(counts < ClassifierConstants.MIN_ROWS_PER_CLASS):
        logger.warning('{}: only {} negative / {} positive rows'.format(name, *counts))

    ids = np.unique(patients)
    rng = np.random.default_rng(seed)
    ids = ids[rng.permutation(len(ids))]
    per_patient = {pid: np.flatnonzero(patients == pid) for pid in ids}
    ids = sorted(ids, key=lambda pid: -len(per_patient[pid]))

    quota = ratios[:, None] * counts[None, :]
    assigned = np.zeros((3, 2))
    parts = [[], [], []]
    for pid in ids:
        rows = per_patient[pid]
        composition = np.array([np.sum(labels[rows] == 0), np.sum(labels[rows] == 1)])
        score = (quota - assigned) @ composition
        part = int(np.argmax(score))
        assigned[part] += composition
        parts[part].extend(rows.tolist())
    split = Split(*(np.array(sorted(part), dtype=int) for part in parts))
    logger.debug('{}: split sizes {}'.format(name, [len(part) for part in split]))
    return split
