import numpy as np
import pytest
from scipy.special import expit
from sklearn.metrics import roc_auc_score

from coronary.miscellaneous.errors import MissingFeatureError
from coronary.analysis.classifier.actions import TrainConfig, MlpModel, init_layers, forward, \
    loss_and_gradients, train_mlp, train_config, predict, auc, evaluate
from coronary.analysis.phantom.actions import DatasetSpec, LabelRule, gen_feature_dataset

SMALL = TrainConfig(epochs=150, lr0=0.01, decay=0.995, hidden_layers=2, width=16, seed=0)


def clusters(seed, n=100):
    rng = np.random.default_rng(seed)
    labels = np.repeat([0, 1], n // 2)
    centers = np.where(labels[:, None] == 1, 3.0, -3.0)
    return centers + rng.standard_normal((n, 2)), labels


class TestGradients:

    def test_against_central_differences(self):
        rng = np.random.default_rng(1)
        layers = init_layers(3, 2, 4, rng)
        inputs = rng.standard_normal((10, 3))
        labels = (rng.random(10) > 0.5).astype(float)
        _, gradients = loss_and_gradients(layers, inputs, labels)
        step = 1e-6
        for index, (w, b) in enumerate(layers):
            for array, analytic in ((w, gradients[index][0]), (b, gradients[index][1])):
                for position in np.ndindex(array.shape):
                    original = array[position]
                    array[position] = original + step
                    upper, _ = loss_and_gradients(layers, inputs, labels)
                    array[position] = original - step
                    lower, _ = loss_and_gradients(layers, inputs, labels)
                    array[position] = original
                    numeric = (upper - lower) / (2 * step)
                    assert abs(numeric - analytic[position]) <= 1e-4 * max(1.0, abs(numeric))

    def test_forward_shapes(self):
        layers = init_layers(5, 3, 7, np.random.default_rng(0))
        logits, pre_activations, activations = forward(layers, np.ones((4, 5)))
        assert logits.shape == (4,)
        assert len(pre_activations) == 3
        assert activations[-1].shape == (4, 7)


class TestTraining:

    def test_separable_clusters(self):
        x, y = clusters(0)
        model = train_mlp((x, y), clusters(1, 40), SMALL, ['a', 'b'])
        accuracy = np.mean((model.predict_proba(x) >= 0.5) == y)
        assert accuracy >= 0.99
        assert len(model.history['val_loss']) == SMALL.epochs

    def test_best_epoch_has_the_lowest_validation_loss(self):
        x, y = clusters(2)
        model = train_mlp((x, y), clusters(3, 40), SMALL)
        history = model.history
        assert history['val_loss'][history['best_epoch']] == min(history['val_loss'])

    def test_deterministic(self):
        x, y = clusters(4)
        a = train_mlp((x, y), clusters(5, 20), SMALL._replace(epochs=20))
        b = train_mlp((x, y), clusters(5, 20), SMALL._replace(epochs=20))
        assert all(np.array_equal(wa, wb) for (wa, _), (wb, _) in zip(a.layers, b.layers))

    def test_non_binary_labels(self):
        x, _ = clusters(0, 10)
        with pytest.raises(ValueError):
            train_mlp((x, np.arange(10)), (x, np.arange(10)), SMALL)

    @pytest.mark.parametrize('seed', range(20))
    def test_noise_labels_give_chance_auc(self, seed):
        table, truth = gen_feature_dataset(DatasetSpec(seed, rows=1000, patients=1000,
                                                       rule=LabelRule.NOISE))
        features = ['max_sd', 'length_mm', 'fai', 'p50']
        x, y = table.matrix(features), truth.labels
        model = train_mlp((x[:400], y[:400]), (x[400:500], y[400:500]),
                          SMALL._replace(epochs=40, seed=seed), features)
        area = auc(model.predict_proba(x[500:]), y[500:])
        assert 0.35 <= area <= 0.65

    def test_config_from_settings(self):
        config = train_config({'classifier': {'epochs': 5, 'width': 3},
                               'pipeline': {'seed': 9}})
        assert (config.epochs, config.width, config.seed) == (5, 3, 9)
        with pytest.raises(ValueError):
            train_config({'classifier': {'split': (0.5, 0.5, 0.5)}})


class TestModel:

    def zero_model(self, bias):
        layers = [(np.zeros((2, 3)), np.zeros(3)), (np.zeros((3, 1)), np.array([bias]))]
        return MlpModel(layers, [0.0, 0.0], [1.0, 1.0], ['fai', 'max_sd'])

    def test_zero_weights_give_the_output_bias(self):
        assert predict(self.zero_model(0.7), {'fai': -80.0, 'max_sd': 0.5}) == \
            pytest.approx(expit(0.7))

    def test_missing_feature(self):
        with pytest.raises(MissingFeatureError):
            predict(self.zero_model(0.0), {'fai': -80.0})

    def test_json_round_trip(self, tmp_path):
        x, y = clusters(6)
        model = train_mlp((x, y), clusters(7, 20), SMALL._replace(epochs=10), ['a', 'b'])
        path = str(tmp_path / 'model.json')
        model.save(path)
        loaded = MlpModel.load(path)
        assert loaded.features == ['a', 'b']
        assert loaded.config == model.config
        assert np.array_equal(loaded.predict_proba(x), model.predict_proba(x))

    def test_rejects_non_finite_weights(self):
        layers = [(np.full((1, 1), np.nan), np.zeros(1))]
        with pytest.raises(ValueError):
            MlpModel(layers, [0.0], [1.0], ['fai'])


class TestMetrics:

    def test_auc_against_pairwise_count(self):
        rng = np.random.default_rng(0)
        scores = rng.integers(0, 5, 40).astype(float)
        labels = rng.integers(0, 2, 40)
        positives, negatives = scores[labels == 1], scores[labels == 0]
        wins = sum((p > n) + 0.5 * (p == n) for p in positives for n in negatives)
        assert auc(scores, labels) == pytest.approx(wins / (len(positives) * len(negatives)))
        assert auc(scores, labels) == pytest.approx(roc_auc_score(labels, scores))

    def test_reversed_ranking(self):
        assert auc([0.9, 0.8, 0.2, 0.1], [0, 0, 1, 1]) == 0.0

    def test_single_class(self):
        assert auc([0.1, 0.2], [1, 1]) is None
        metrics = evaluate([0.1, 0.7], [1, 1])
        assert metrics.auc is None
        assert metrics.flags == ('auc_undefined',)

    def test_threshold_is_inclusive(self):
        metrics = evaluate([0.5, 0.49], [1, 0])
        assert metrics.accuracy == 1.0
        assert metrics.f1 == 1.0

    def test_loss_is_clipped(self):
        metrics = evaluate([0.0, 1.0], [1, 0])
        assert np.isfinite(metrics.loss_mean)
