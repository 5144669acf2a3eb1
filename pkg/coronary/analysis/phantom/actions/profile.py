"""Synthetic radius profiles with analytic lesions."""

import logging

import numpy as np

from coronary.metrics.metrics import publish_coronary_metric
from coronary.analysis.stenosis.actions import RadiusProfile
from .constants import LesionShape, SD_LEVELS
from .spec import ground_truth

logger = logging.getLogger(__name__)


def lesion_shape(lesion, gamma):
    """Unit-height narrowing shape of a lesion at abscissa gamma."""
    offset = np.asarray(gamma, dtype=float) - lesion.center_mm
    if LesionShape(lesion.shape) is LesionShape.GAUSSIAN:
        sigma = lesion.width_mm / 4.0
        return np.exp(-offset ** 2 / (2.0 * sigma ** 2))
    inside = np.abs(offset) <= lesion.width_mm / 2.0
    return np.where(inside, 0.5 * (1.0 + np.cos(2.0 * np.pi * offset / lesion.width_mm)), 0.0)


def lesion_crossing(lesion, level):
    """Distance from the center where the lesion's SD falls to level; None if never reached."""
    if lesion.depth <= level:
        return None
    if LesionShape(lesion.shape) is LesionShape.GAUSSIAN:
        return lesion.width_mm / 4.0 * np.sqrt(2.0 * np.log(lesion.depth / level))
    return lesion.width_mm / (2.0 * np.pi) * np.arccos(2.0 * level / lesion.depth - 1.0)


def baseline_radius(spec, gamma):
    gamma = np.asarray(gamma, dtype=float)
    radius = spec.radius_mm - spec.taper_mm * gamma / spec.length_mm
    if spec.ripple:
        phase = np.random.default_rng(spec.seed).uniform(0.0, 2.0 * np.pi)
        radius = radius * (1.0 + spec.ripple * np.sin(2.0 * np.pi * gamma / spec.ripple_period_mm
                                                      + phase))
    return radius


def narrowing(lesions, gamma):
    """Product of (1 - depth * shape) over the lesions."""
    factor = np.ones_like(np.asarray(gamma, dtype=float))
    for lesion in lesions:
        factor = factor * (1.0 - lesion.depth * lesion_shape(lesion, gamma))
    return factor


def gen_radius_profile(spec):
    """Radius profile r = baseline * prod(1 - depth_k * shape_k).

    :param spec: PhantomSpec
    :return: (RadiusProfile, GroundTruth) where the truth holds the
             baseline, the true SD and per lesion its center, depth and
             the analytic 0.10 / 0.20 SD crossings

    """

    publish_coronary_metric('analysis.phantom.gen_radius_profile')
    count = int(np.floor(spec.length_mm / spec.spacing_mm + 1e-9)) + 1
    gamma = spec.spacing_mm * np.arange(count)
    baseline = baseline_radius(spec, gamma)
    radius = baseline * narrowing(spec.lesions, gamma)

    lesions = []
    for lesion in sorted(spec.lesions, key=lambda lesion: lesion.center_mm):
        crossings = {}
        for level in SD_LEVELS:
            half = lesion_crossing(lesion, level)
            crossings['{:.2f}'.format(level)] = (
                None if half is None else (lesion.center_mm - half, lesion.center_mm + half))
        lesions.append(ground_truth(center_mm=lesion.center_mm, depth=lesion.depth,
                                    width_mm=lesion.width_mm, shape=LesionShape(lesion.shape).value,
                                    crossings=crossings))
    truth = ground_truth(abscissa=gamma, healthy_radius=baseline, sd=1.0 - radius / baseline,
                         lesions=lesions, spec=spec.as_dict())
    logger.debug('phantom profile: {} points, {} lesion(s)'.format(count, len(lesions)))
    return RadiusProfile(gamma, radius), truth
