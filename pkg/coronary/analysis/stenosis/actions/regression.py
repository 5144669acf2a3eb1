"""Robust weighted Gaussian kernel regression of the healthy vessel radius."""

import collections
import functools
import logging

import numpy as np
from scipy import signal, stats

from .constants import StenosisConstants

logger = logging.getLogger(__name__)

RegressionParams = collections.namedtuple(
    'RegressionParams', ['sigma_x', 'sigma_max', 'sigma_r', 'kappa'])

RegressionIntermediates = collections.namedtuple(
    'RegressionIntermediates', ['r_max', 'w', 'r_h', 'flags'])

StenosisProfile = collections.namedtuple('StenosisProfile', ['sd'])


def validate_params(params, bounds=None):
    """Check that sigmas are positive (and inside bounds when given)."""
    for name in ('sigma_x', 'sigma_max', 'sigma_r'):
        value = getattr(params, name)
        if not np.isfinite(value) or value <= 0:
            raise ValueError('{} must be > 0, got {}'.format(name, value))
        if bounds is not None:
            low, high = bounds[name]
            if not low <= value <= high:
                raise ValueError('{}={} outside bounds [{}, {}]'.format(name, value, low, high))
    if not np.isfinite(params.kappa) or params.kappa < 0:
        raise ValueError('kappa must be >= 0, got {}'.format(params.kappa))


@functools.lru_cache(maxsize=16)
def _index_distance2(n):
    offsets = np.arange(n, dtype=float)
    distance2 = (offsets[:, None] - offsets[None, :]) ** 2
    distance2.setflags(write=False)
    return distance2


def gaussian_kernel(n, sigma):
    """Unnormalized N(i'|i, sigma) over point indices, no truncation."""
    return np.exp(-_index_distance2(n) / (2.0 * sigma ** 2))


def compute_kappa(profile):
    """Additive correction of the smoothed radius.

    Average of the largest topographic prominence of the inverted radius
    signal (the deepest lesion) and the radius range.

    :param profile: RadiusProfile
    :return: kappa, mm

    """

    radius = profile.radius
    spread = float(radius.max() - radius.min())
    dips, _ = signal.find_peaks(-radius)
    if not len(dips):
        return spread / 2.0
    prominences = signal.peak_prominences(-radius, dips)[0]
    return (float(prominences.max()) + spread) / 2.0


def healthy_radius(profile, params):
    """Equivalent healthy radius of a vessel.

    r_max is the Gaussian smoothing of r with sigma_max plus kappa, each
    observation is weighted by the normal density of r_i around r_max_i
    with sigma_r, and r_h is the weighted Gaussian smoothing with
    sigma_x. All kernels run over point indices and all n points.

    :param profile: RadiusProfile
    :param params: RegressionParams
    :return: RegressionIntermediates

    """

    validate_params(params)
    radius = profile.radius
    n = len(radius)

    k_max = gaussian_kernel(n, params.sigma_max)
    r_max = (k_max @ radius) / k_max.sum(axis=1) + params.kappa
    w = stats.norm.pdf(radius, loc=r_max, scale=params.sigma_r)

    k_x = gaussian_kernel(n, params.sigma_x)
    numerator = k_x @ (w * radius)
    denominator = k_x @ w
    flags = []
    vanished = ~(denominator > 0)
    if np.any(vanished):
        flags.append('weights_vanished')
        logger.warning('weights vanished at {} of {} points; using unweighted smoothing there'.format(
            int(vanished.sum()), n))
        denominator = np.where(vanished, 1.0, denominator)
        plain = (k_x @ radius) / k_x.sum(axis=1)
        r_h = np.where(vanished, plain, numerator / denominator)
    else:
        r_h = numerator / denominator
    return RegressionIntermediates(r_max=r_max, w=w, r_h=r_h, flags=tuple(flags))


def stenosis_degree(profile, r_h):
    """SD_i = 1 - r_i / r_h_i.

    :param profile: RadiusProfile
    :param r_h: healthy radius per point
    :return: StenosisProfile

    """

    r_h = np.asarray(r_h, dtype=float)
    if r_h.shape != profile.radius.shape:
        raise ValueError('healthy radius is not aligned with the profile')
    if not np.all(np.isfinite(r_h)) or np.any(r_h <= 0):
        raise ValueError('healthy radius must be finite and > 0')
    return StenosisProfile(sd=1.0 - profile.radius / r_h)


def default_bounds(config=None):
    settings = (config or {}).get('stenosis', {})
    return {
        'sigma_x': tuple(settings.get('sigma_x_bounds', StenosisConstants.SIGMA_X_BOUNDS)),
        'sigma_max': tuple(settings.get('sigma_max_bounds', StenosisConstants.SIGMA_MAX_BOUNDS)),
        'sigma_r': tuple(settings.get('sigma_r_bounds', StenosisConstants.SIGMA_R_BOUNDS)),
    }
