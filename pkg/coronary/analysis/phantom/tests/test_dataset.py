import numpy as np
import pytest

from coronary.miscellaneous.errors import PhantomSpecError
from coronary.analysis.classifier.actions import ID_COLUMNS, FUNCTIONAL_COLUMNS, label_lesions
from coronary.analysis.phantom.actions import DatasetSpec, LabelRule, gen_feature_dataset, \
    gen_coronary_tree, PhantomSpec, TreeTemplate


class TestFeatureDataset:

    def test_deterministic(self):
        a, _ = gen_feature_dataset(DatasetSpec(11, rows=80, patients=20))
        b, _ = gen_feature_dataset(DatasetSpec(11, rows=80, patients=20))
        assert a.frame.equals(b.frame)

    def test_columns_and_patients(self):
        table, _ = gen_feature_dataset(DatasetSpec(1, rows=100, patients=30))
        assert list(table.frame.columns[:3]) == ID_COLUMNS
        assert table.has_functional
        assert table.frame['patient'].nunique() == 30
        assert not table.frame.duplicated(ID_COLUMNS).any()

    @pytest.mark.parametrize('criterion', ['FFR', 'WSS', 'DFFR', 'HRS'])
    def test_every_criterion_reproduces_the_labels(self, criterion):
        table, truth = gen_feature_dataset(DatasetSpec(2, rows=120, patients=40))
        labels = label_lesions(table, criterion)
        assert np.array_equal(labels.values, truth.labels)

    def test_linear_rule(self):
        spec = DatasetSpec(3, rows=200, patients=50, signal_features=('fai',))
        table, truth = gen_feature_dataset(spec)
        # fai is -85 + 9 z and the label is z > 0
        assert np.array_equal(truth.labels, (table.frame['fai'] > -85.0).astype(int).to_numpy())

    def test_xor_rule(self):
        spec = DatasetSpec(4, rows=200, patients=50, rule=LabelRule.XOR,
                           signal_features=('max_sd', 'fai'))
        table, truth = gen_feature_dataset(spec)
        expected = (table.frame['max_sd'] > 0.40) != (table.frame['fai'] > -85.0)
        assert np.array_equal(truth.labels, expected.astype(int).to_numpy())

    def test_unknown_signal_feature(self):
        with pytest.raises(PhantomSpecError):
            gen_feature_dataset(DatasetSpec(0, signal_features=('volume',)))

    def test_invalid_specs(self):
        with pytest.raises(PhantomSpecError):
            DatasetSpec(0, rows=10, patients=20)
        with pytest.raises(PhantomSpecError):
            DatasetSpec(0, rule=LabelRule.XOR, signal_features=('fai',))
        with pytest.raises(PhantomSpecError):
            DatasetSpec(0, signal_features=('fai', 'max_sd'), weights=(1.0,))

    def test_functional_values_are_valid(self):
        table, _ = gen_feature_dataset(DatasetSpec(5))
        frame = table.frame[FUNCTIONAL_COLUMNS]
        assert frame['vffr'].between(0.6, 0.99).all()
        assert (frame['wss'] >= 0).all()


class TestCoronaryTree:

    def test_deterministic(self):
        a, truth_a = gen_coronary_tree(PhantomSpec(3, template=TreeTemplate.LEFT))
        b, truth_b = gen_coronary_tree(PhantomSpec(3, template=TreeTemplate.LEFT))
        assert truth_a.labels == truth_b.labels
        for x, y in zip(a.centerlines, b.centerlines):
            assert np.array_equal(x.points, y.points)

    def test_ostium_is_the_shared_start(self):
        tree, _ = gen_coronary_tree(PhantomSpec(0, template=TreeTemplate.RIGHT_DOMINANT),
                                    ostium=(5.0, -2.0, 1.0))
        for centerline in tree.centerlines:
            assert np.allclose(centerline.points[0], [5.0, -2.0, 1.0])
