import collections
import logging
import threading

logger = logging.getLogger(__name__)

_COUNTS = collections.Counter()
_LOCK = threading.Lock()


def publish_coronary_metric(metric_name, value=1):
    """Publish a stage metric based on its name and value.

    Metrics are accumulated in-process; the pipeline writes a snapshot
    into every run summary. The structure of a metric name:
    <area>.<module>.<event>

    :param metric_name: e.g. 'analysis.stenosis.optimize'
    :param value: amount added to the counter
    :return: None

    """

    with _LOCK:
        _COUNTS[metric_name] += value
    logger.debug('metric {} += {}'.format(metric_name, value))


def get_metric_counts():
    """Return a sorted snapshot of all published metrics.

    :return: dict of metric name to accumulated value

    """

    with _LOCK:
        return dict(sorted(_COUNTS.items()))


def reset_metric_counts():
    """Clear all accumulated metrics."""
    with _LOCK:
        _COUNTS.clear()
