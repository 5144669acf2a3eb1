import numpy as np
import pytest

from coronary.analysis.classifier.actions import MORPHOLOGY_COLUMNS, PCAT_FEATURE_COLUMNS, \
    rfe_select, zscore
from coronary.analysis.phantom.actions import DatasetSpec, gen_feature_dataset


@pytest.fixture
def separable():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(200)
    noise = rng.standard_normal(200)
    labels = (x + 0.3 * rng.standard_normal(200) > 0).astype(int)
    return x, noise, labels


class TestZscore:

    def test_constant_column_maps_to_zero(self):
        values = np.array([[1.0, 5.0], [3.0, 5.0]])
        scaled, mean, std = zscore(values)
        assert np.array_equal(scaled[:, 1], [0.0, 0.0])
        assert std[1] == 1.0
        assert np.allclose(scaled[:, 0], [-1.0, 1.0])

    def test_reuses_training_statistics(self):
        _, mean, std = zscore(np.array([[0.0], [2.0]]))
        assert zscore(np.array([[4.0]]), mean, std)[0][0, 0] == 3.0


class TestRfeSelect:

    def test_keeping_every_feature(self, separable):
        x, noise, labels = separable
        result = rfe_select(np.column_stack([x, noise]), labels, ['x', 'noise'], k=2)
        assert result.selected == ['x', 'noise']
        assert result.eliminated == []

    def test_duplicate_column_ties_drop_the_later(self, separable):
        x, noise, labels = separable
        features = np.column_stack([x, x, noise])
        result = rfe_select(features, labels, ['x', 'x_copy', 'noise'], k=1)
        assert result.eliminated == ['noise', 'x_copy']
        assert result.selected == ['x']

    def test_recovers_planted_signal(self):
        table, _ = gen_feature_dataset(DatasetSpec(6, rows=300, patients=100,
                                                   signal_features=('max_sd', 'fai')))
        names = MORPHOLOGY_COLUMNS + PCAT_FEATURE_COLUMNS
        result = rfe_select(table.matrix(names), table.frame['vffr'] <= 0.80, names, k=2)
        assert sorted(result.selected) == ['fai', 'max_sd']
        assert len(result.eliminated) == len(names) - 2

    def test_invalid_k(self, separable):
        x, noise, labels = separable
        with pytest.raises(ValueError):
            rfe_select(np.column_stack([x, noise]), labels, ['x', 'noise'], k=3)
