"""Per-lesion feature tables."""

import logging

import numpy as np
import pandas as pd

from coronary.miscellaneous.errors import MissingFeatureError
from .constants import BranchSubset, ID_COLUMNS, FUNCTIONAL_COLUMNS, BRANCH_COLUMNS

logger = logging.getLogger(__name__)

MORPHOLOGY_COLUMNS = ['max_sd', 'length_mm', 'mla_mm2', 'dist_ostium_mm', 'tortuosity']
PCAT_FEATURE_COLUMNS = ['fai', 'p10', 'p25', 'p50', 'p75', 'p90', 'p95', 'fat_fraction',
                        'fat_volume_mm3']


class FeatureTable:
    """Lesion rows with provenance ids, numeric features and functional columns.

    :param frame: pandas DataFrame holding the id columns, any number of
                  numeric feature columns and optionally vffr, wss, dffr
    """

    def __init__(self, frame):
        frame = frame.reset_index(drop=True)
        missing = [column for column in ID_COLUMNS if column not in frame.columns]
        if missing:
            raise ValueError('feature table lacks id column(s) {}'.format(missing))
        if 'wss' in frame.columns and (frame['wss'].dropna() < 0).any():
            raise ValueError('WSS must be >= 0')
        if 'vffr' in frame.columns:
            vffr = frame['vffr'].dropna()
            if ((vffr <= 0) | (vffr > 1)).any():
                raise ValueError('vFFR must lie in (0, 1]')
        self.frame = frame

    def __len__(self):
        return len(self.frame)

    @property
    def feature_columns(self):
        reserved = set(ID_COLUMNS) | set(FUNCTIONAL_COLUMNS)
        return [column for column in self.frame.columns
                if column not in reserved and pd.api.types.is_numeric_dtype(self.frame[column])]

    @property
    def has_functional(self):
        return all(column in self.frame.columns for column in FUNCTIONAL_COLUMNS)

    @property
    def patients(self):
        return self.frame['patient'].astype(str).to_numpy()

    def matrix(self, features, rows=None):
        """Float matrix of the named features.

        :param features: ordered feature names
        :param rows: optional row positions
        :return: (n, k) array
        :raises MissingFeatureError: unknown feature name
        :raises ValueError: missing value in a selected column

        """

        for name in features:
            if name not in self.frame.columns:
                raise MissingFeatureError('feature {} is not in the table'.format(name))
        frame = self.frame if rows is None else self.frame.iloc[np.asarray(rows, dtype=int)]
        values = frame[list(features)].to_numpy(dtype=float)
        if np.isnan(values).any():
            columns = [name for name, bad in zip(features, np.isnan(values).any(axis=0)) if bad]
            raise ValueError('missing values in feature column(s) {}'.format(columns))
        return values

    def complete_rows(self, features):
        """Positions of the rows without missing values in the named features."""
        values = self.frame[list(features)].to_numpy(dtype=float)
        return np.flatnonzero(~np.isnan(values).any(axis=1))

    def subset(self, subset):
        subset = BranchSubset(subset)
        if subset is BranchSubset.ALL:
            return self
        return FeatureTable(self.frame[self.frame['branch'] == subset.value])

    def to_csv(self, path, header=None):
        with open(path, 'w') as fh:
            if header:
                fh.write('# {}\n'.format(header))
            self.frame.to_csv(fh, index=False, float_format='%.17g', lineterminator='\n')

    @classmethod
    def from_csv(cls, path):
        return cls(pd.read_csv(path, comment='#', dtype={'patient': str, 'branch': str}))


def build_feature_table(lesions, pcat_rows=(), functional=None, patient='case'):
    """Merge lesion morphometrics, lesion PCAT features and functional values.

    :param lesions: list of Lesion
    :param pcat_rows: list of PcatRow; lesion-scope rows are joined on
                      (branch, lesion_id)
    :param functional: optional DataFrame with branch, lesion_id, vffr,
                       wss, dffr (and optionally patient)
    :param patient: patient id of the lesions
    :return: FeatureTable

    """

    records = []
    pcat = {(row.branch, row.lesion_id): row.features for row in pcat_rows
            if row.lesion_id}
    for lesion in lesions:
        record = {'patient': str(patient), 'branch': lesion.branch, 'lesion_id': lesion.lesion_id}
        record.update({name: getattr(lesion, name) for name in MORPHOLOGY_COLUMNS})
        features = pcat.get((lesion.branch, lesion.lesion_id))
        for name in PCAT_FEATURE_COLUMNS:
            value = None if features is None else getattr(features, name)
            record[name] = np.nan if value is None else float(value)
        for column in BRANCH_COLUMNS:
            record[column] = float(column == 'branch_' + lesion.branch)
        records.append(record)
    columns = ID_COLUMNS + MORPHOLOGY_COLUMNS + PCAT_FEATURE_COLUMNS + BRANCH_COLUMNS
    frame = pd.DataFrame(records, columns=columns)

    if functional is not None:
        functional = functional.drop(columns=['patient'], errors='ignore')
        frame = frame.merge(functional[['branch', 'lesion_id'] + FUNCTIONAL_COLUMNS],
                            on=['branch', 'lesion_id'], how='left')
        unmatched = int(frame['vffr'].isna().sum())
        if unmatched:
            logger.warning('{} lesion(s) without functional values'.format(unmatched))
    logger.debug('feature table: {} lesions, {} columns'.format(len(frame), len(frame.columns)))
    return FeatureTable(frame)
