"""Multi-layer perceptron with ReLU hidden layers and a sigmoid output, trained with ADAM."""

import collections
import json
import logging

import numpy as np
from scipy.special import expit

from coronary.miscellaneous.convert import write_json
from coronary.miscellaneous.errors import DivergenceError, MissingFeatureError
from coronary.metrics.metrics import publish_coronary_metric
from .constants import ClassifierConstants
from .selection import zscore

logger = logging.getLogger(__name__)

_TRAIN_FIELDS = ['epochs', 'lr0', 'decay', 'hidden_layers', 'width', 'seed', 'split', 'k_features']

TrainConfig = collections.namedtuple('TrainConfig', _TRAIN_FIELDS)
TrainConfig.__new__.__defaults__ = (
    ClassifierConstants.EPOCHS, ClassifierConstants.LR0, ClassifierConstants.DECAY,
    ClassifierConstants.HIDDEN_LAYERS, ClassifierConstants.WIDTH, 0,
    tuple(ClassifierConstants.SPLIT), ClassifierConstants.K_FEATURES)


def train_config(config=None, seed=None):
    """TrainConfig from the [classifier] section of a pipeline config."""
    settings = (config or {}).get('classifier', {})
    if seed is None:
        seed = (config or {}).get('pipeline', {}).get('seed', 0)
    values = {name: settings[name] for name in _TRAIN_FIELDS if name in settings}
    values['seed'] = int(seed)
    result = TrainConfig(**values)
    result = result._replace(split=tuple(result.split))
    if result.epochs < 1 or result.lr0 <= 0 or result.decay <= 0 or result.hidden_layers < 1 \
            or result.width < 1 or result.k_features < 1:
        raise ValueError('training parameters must be positive: {}'.format(result))
    if abs(sum(result.split) - 1.0) > 1e-9:
        raise ValueError('split {} does not sum to 1'.format(result.split))
    return result


def init_layers(n_inputs, hidden_layers, width, rng):
    """He-initialized (w, b) pairs, the last one mapping to a single logit."""
    sizes = [n_inputs] + [width] * hidden_layers + [1]
    layers = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        scale = np.sqrt(2.0 / fan_in) if fan_out != 1 else np.sqrt(1.0 / fan_in)
        layers.append((rng.normal(0.0, scale, size=(fan_in, fan_out)), np.zeros(fan_out)))
    return layers


def forward(layers, inputs):
    """Logits of a batch plus the cached pre-activations and activations."""
    activations = [inputs]
    pre_activations = []
    a = inputs
    for w, b in layers[:-1]:
        z = a @ w + b
        pre_activations.append(z)
        a = np.maximum(z, 0.0)
        activations.append(a)
    w, b = layers[-1]
    return (a @ w + b)[:, 0], pre_activations, activations


def cross_entropy(logits, labels):
    """Per-row binary cross-entropy of sigmoid(logits)."""
    return np.logaddexp(0.0, logits) - labels * logits


def loss_and_gradients(layers, inputs, labels):
    """Mean cross-entropy and its gradient with respect to every (w, b).

    :param layers: list of (w, b)
    :param inputs: (n, m) normalized features
    :param labels: (n,) binary labels
    :return: (loss, [(dw, db), ...])

    """

    labels = np.asarray(labels, dtype=float)
    logits, pre_activations, activations = forward(layers, inputs)
    loss = float(np.mean(cross_entropy(logits, labels)))
    delta = ((expit(logits) - labels) / len(labels))[:, None]
    gradients = [None] * len(layers)
    for index in range(len(layers) - 1, -1, -1):
        w = layers[index][0]
        gradients[index] = (activations[index].T @ delta, delta.sum(axis=0))
        if index:
            delta = (delta @ w.T) * (pre_activations[index - 1] > 0)
    return loss, gradients


class MlpModel:
    """Trained network with its input normalization and feature order."""

    def __init__(self, layers, mean, std, features, config=None, history=None):
        self.layers = [(np.asarray(w, dtype=float), np.asarray(b, dtype=float)) for w, b in layers]
        self.mean = np.asarray(mean, dtype=float)
        self.std = np.asarray(std, dtype=float)
        self.features = list(features)
        self.config = config or TrainConfig()
        self.history = history or {}
        if np.any(self.std <= 0):
            raise ValueError('normalization stds must be > 0')
        if not all(np.all(np.isfinite(w)) and np.all(np.isfinite(b)) for w, b in self.layers):
            raise ValueError('model weights must be finite')
        if self.layers[0][0].shape[0] != len(self.features):
            raise ValueError('{} inputs for {} features'.format(
                self.layers[0][0].shape[0], len(self.features)))

    def predict_proba(self, values):
        """Probabilities for an (n, k) matrix of raw feature values."""
        scaled, _, _ = zscore(np.atleast_2d(values), self.mean, self.std)
        return expit(forward(self.layers, scaled)[0])

    def as_dict(self):
        return {
            'config': self.config._asdict(),
            'selected_features': self.features,
            'normalization': {'mean': self.mean, 'std': self.std},
            'layers': [{'w': w, 'b': b} for w, b in self.layers],
        }

    @classmethod
    def from_dict(cls, document):
        config = dict(document['config'])
        config['split'] = tuple(config['split'])
        layers = [(np.array(layer['w'], dtype=float).reshape(len(layer['w']), -1),
                   np.array(layer['b'], dtype=float)) for layer in document['layers']]
        normalization = document['normalization']
        return cls(layers, normalization['mean'], normalization['std'],
                   document['selected_features'], TrainConfig(**config))

    def save(self, path):
        write_json(path, self.as_dict())

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def train_mlp(train, val, config=None, features=None):
    """Full-batch ADAM training with an exponentially decayed learning rate.

    The returned weights are those of the epoch with the lowest
    validation loss (training loss when the validation part is empty).

    :param train: (features, labels) of the training rows, raw values
    :param val: (features, labels) of the validation rows
    :param config: TrainConfig
    :param features: column names, in matrix order
    :return: MlpModel
    :raises DivergenceError: non-finite loss

    """

    publish_coronary_metric('analysis.classifier.train_mlp')
    config = config or TrainConfig()
    train_x, train_y = np.asarray(train[0], dtype=float), np.asarray(train[1], dtype=float)
    val_x, val_y = np.asarray(val[0], dtype=float), np.asarray(val[1], dtype=float)
    if features is None:
        features = ['x{}'.format(i) for i in range(train_x.shape[1])]
    if not set(np.unique(train_y)) <= {0.0, 1.0}:
        raise ValueError('labels must be binary')

    scaled, mean, std = zscore(train_x)
    val_scaled = zscore(val_x, mean, std)[0] if len(val_y) else None
    rng = np.random.default_rng(config.seed)
    layers = init_layers(scaled.shape[1], config.hidden_layers, config.width, rng)
    moments = [(np.zeros_like(w), np.zeros_like(b)) for w, b in layers]
    velocities = [(np.zeros_like(w), np.zeros_like(b)) for w, b in layers]
    beta1, beta2 = ClassifierConstants.ADAM_BETA1, ClassifierConstants.ADAM_BETA2
    eps = ClassifierConstants.ADAM_EPS

    best_loss, best_epoch, best_layers = np.inf, -1, layers
    history = {'train_loss': [], 'val_loss': []}
    for epoch in range(config.epochs):
        loss, gradients = loss_and_gradients(layers, scaled, train_y)
        if not np.isfinite(loss):
            raise DivergenceError('training loss is {} at epoch {}'.format(loss, epoch))
        lr = config.lr0 * config.decay ** epoch
        step = epoch + 1
        updated = []
        for index, ((w, b), (dw, db)) in enumerate(zip(layers, gradients)):
            (mw, mb), (vw, vb) = moments[index], velocities[index]
            mw, mb = beta1 * mw + (1 - beta1) * dw, beta1 * mb + (1 - beta1) * db
            vw, vb = beta2 * vw + (1 - beta2) * dw ** 2, beta2 * vb + (1 - beta2) * db ** 2
            moments[index], velocities[index] = (mw, mb), (vw, vb)
            correction1, correction2 = 1 - beta1 ** step, 1 - beta2 ** step
            w = w - lr * (mw / correction1) / (np.sqrt(vw / correction2) + eps)
            b = b - lr * (mb / correction1) / (np.sqrt(vb / correction2) + eps)
            updated.append((w, b))
        layers = updated

        if val_scaled is not None:
            monitored = float(np.mean(cross_entropy(forward(layers, val_scaled)[0], val_y)))
        else:
            monitored = float(np.mean(cross_entropy(forward(layers, scaled)[0], train_y)))
        if not np.isfinite(monitored):
            raise DivergenceError('validation loss is {} at epoch {}'.format(monitored, epoch))
        history['train_loss'].append(loss)
        history['val_loss'].append(monitored)
        if monitored < best_loss:
            best_loss, best_epoch, best_layers = monitored, epoch, layers

    logger.info('MLP: best validation loss {:.4f} at epoch {} of {}'.format(
        best_loss, best_epoch, config.epochs))
    history['best_epoch'] = best_epoch
    return MlpModel(best_layers, mean, std, features, config, history)


def predict(model, row):
    """Probability of the positive class for one row.

    :param model: MlpModel
    :param row: mapping of feature name to value
    :return: float in (0, 1)
    :raises MissingFeatureError: a selected feature is missing from the row

    """

    values = []
    for name in model.features:
        if name not in row:
            raise MissingFeatureError('row lacks feature {}'.format(name))
        values.append(float(row[name]))
    return float(model.predict_proba(np.array([values]))[0])


def predict_frame(model, frame):
    """Probabilities for every row of a DataFrame."""
    missing = [name for name in model.features if name not in frame.columns]
    if missing:
        raise MissingFeatureError('table lacks feature(s) {}'.format(', '.join(missing)))
    return model.predict_proba(frame[model.features].to_numpy(dtype=float))
