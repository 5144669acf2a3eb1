import numpy as np
import pandas as pd
import pytest

from coronary.miscellaneous.errors import SplitError
from coronary.analysis.classifier.actions import FeatureTable, LabelCriterion, label_lesions, \
    stratified_split
from coronary.analysis.phantom.actions import DatasetSpec, gen_feature_dataset


def functional_table(vffr, wss, dffr):
    n = len(vffr)
    return FeatureTable(pd.DataFrame({'patient': ['P{}'.format(i) for i in range(n)],
                                      'branch': ['LAD'] * n, 'lesion_id': [1] * n,
                                      'max_sd': np.linspace(0.2, 0.6, n),
                                      'vffr': vffr, 'wss': wss, 'dffr': dffr}))


class TestLabelCriterion:

    @pytest.mark.parametrize('vffr, expected', [(0.80, 1), (0.8000001, 0), (0.5, 1)])
    def test_ffr_cutoff(self, vffr, expected):
        assert LabelCriterion('FFR').apply([vffr], [0.0], [0.0])[0] == expected

    @pytest.mark.parametrize('wss, expected', [(15.46, 0), (15.47, 1), (40.0, 1)])
    def test_wss_cutoff(self, wss, expected):
        assert LabelCriterion('WSS').apply([0.9], [wss], [0.0])[0] == expected

    @pytest.mark.parametrize('dffr, expected', [(0.06, 1), (0.0599, 0)])
    def test_dffr_cutoff(self, dffr, expected):
        assert LabelCriterion('DFFR').apply([0.9], [0.0], [dffr])[0] == expected

    def test_high_risk_needs_two_of_three(self):
        hrs = LabelCriterion('HRS')
        assert hrs.apply([0.7], [20.0], [0.0])[0] == 1
        assert hrs.apply([0.7], [5.0], [0.0])[0] == 0
        assert hrs.apply([0.9], [20.0], [0.1])[0] == 1
        assert hrs.apply([0.9], [5.0], [0.0])[0] == 0

    def test_unknown_criterion(self):
        with pytest.raises(ValueError):
            LabelCriterion('CT-FFR')


class TestLabelLesions:

    def test_rows_without_values_are_excluded(self):
        table = functional_table([0.7, np.nan, 0.9], [20.0, 20.0, 5.0], [0.1, 0.1, 0.0])
        labels = label_lesions(table, 'FFR')
        assert labels.rows.tolist() == [0, 2]
        assert labels.values.tolist() == [1, 0]
        assert labels.excluded == (1,)

    def test_wss_label_ignores_missing_ffr(self):
        table = functional_table([0.7, np.nan, 0.9], [20.0, 20.0, 5.0], [0.1, 0.1, 0.0])
        assert label_lesions(table, 'WSS').values.tolist() == [1, 1, 0]

    def test_missing_functional_column(self):
        frame = functional_table([0.7], [1.0], [0.0]).frame.drop(columns=['dffr'])
        with pytest.raises(ValueError):
            label_lesions(FeatureTable(frame), 'HRS')


class TestStratifiedSplit:

    @pytest.fixture
    def dataset(self):
        table, truth = gen_feature_dataset(DatasetSpec(8, rows=300, patients=90))
        return table.patients, truth.labels

    def test_partition_keeps_patients_together(self, dataset):
        patients, labels = dataset
        split = stratified_split(patients, labels, seed=0)
        rows = np.concatenate(split)
        assert sorted(rows.tolist()) == list(range(len(labels)))
        groups = [set(patients[part]) for part in split]
        assert not groups[0] & groups[1]
        assert not groups[0] & groups[2]
        assert not groups[1] & groups[2]

    def test_proportions(self, dataset):
        patients, labels = dataset
        split = stratified_split(patients, labels, seed=1)
        sizes = np.array([len(part) for part in split]) / len(labels)
        assert np.allclose(sizes, [0.8, 0.1, 0.1], atol=0.05)
        overall = labels.mean()
        for part in split:
            assert abs(labels[part].mean() - overall) < 0.15

    def test_deterministic(self, dataset):
        patients, labels = dataset
        a = stratified_split(patients, labels, seed=3)
        b = stratified_split(patients, labels, seed=3)
        assert all(np.array_equal(x, y) for x, y in zip(a, b))

    def test_single_class(self):
        with pytest.raises(SplitError):
            stratified_split(['a', 'b', 'c'], [0, 0, 0], seed=0)

    def test_invalid_ratios(self):
        with pytest.raises(ValueError):
            stratified_split(['a', 'b'], [0, 1], seed=0, ratios=(0.5, 0.5, 0.5))
