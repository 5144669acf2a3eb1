"""Peak-based loss and the two-stage parameter search (grid, then L-BFGS-B)."""

import collections
import logging

import numpy as np
from scipy import optimize, signal

from coronary.metrics.metrics import publish_coronary_metric
from .constants import StenosisConstants
from .regression import RegressionParams, compute_kappa, healthy_radius, default_bounds

logger = logging.getLogger(__name__)

PeakSet = collections.namedtuple('PeakSet', ['indices', 'flags'])

OptimizationResult = collections.namedtuple(
    'OptimizationResult',
    ['params', 'loss', 'grid_params', 'grid_loss', 'refined_loss', 'peaks', 'flags'])

PARAM_NAMES = ('sigma_x', 'sigma_max', 'sigma_r')


def detect_peaks(profile, distance_diameters=StenosisConstants.PEAK_DISTANCE_DIAMETERS,
                 prominence_fraction=StenosisConstants.PEAK_PROMINENCE_FRACTION):
    """Healthy support points of the radius signal.

    Local maxima are kept at least distance_diameters mean diameters
    apart (the higher peak wins), then only peaks whose prominence
    reaches prominence_fraction of the largest prominence are retained.

    :param profile: RadiusProfile (uniformly sampled)
    :param distance_diameters: minimum separation in mean diameters
    :param prominence_fraction: retention threshold
    :return: PeakSet; the profile endpoints, flagged, when no peak exists

    """

    radius = profile.radius
    spacing = float(np.mean(np.diff(profile.abscissa)))
    separation_mm = distance_diameters * 2.0 * float(np.mean(radius))
    distance = max(1, int(np.ceil(separation_mm / spacing - 1e-9)))
    peaks, _ = signal.find_peaks(radius, distance=distance)
    if not len(peaks):
        logger.debug('no radius peak; using the profile endpoints')
        return PeakSet(np.array([0, len(radius) - 1]), ('no_peaks',))
    prominences = signal.peak_prominences(radius, peaks)[0]
    keep = prominences >= prominence_fraction * prominences.max()
    return PeakSet(peaks[keep], ())


def regression_loss(params, profile, peaks=None):
    """Mean squared error between healthy and observed radius at the peaks.

    :param params: RegressionParams
    :param profile: RadiusProfile
    :param peaks: peak indices; detect_peaks() when omitted
    :return: loss, mm^2

    """

    if peaks is None:
        peaks = detect_peaks(profile).indices
    peaks = np.asarray(peaks)
    r_h = healthy_radius(profile, params).r_h
    return float(np.mean((r_h[peaks] - profile.radius[peaks]) ** 2))


class RegressionObjective:
    """Loss as a function of (sigma_x, sigma_max, sigma_r) with kappa fixed.

    Picklable so the grid stage can be spread over worker processes.
    """

    def __init__(self, profile, kappa, peaks):
        self.profile = profile
        self.kappa = kappa
        self.peaks = np.asarray(peaks)

    def __call__(self, theta):
        params = RegressionParams(float(theta[0]), float(theta[1]), float(theta[2]), self.kappa)
        try:
            return regression_loss(params, self.profile, self.peaks)
        except (ValueError, FloatingPointError):
            return np.inf


class _LogObjective:

    def __init__(self, objective):
        self.objective = objective

    def __call__(self, log_theta):
        return self.objective(np.exp(log_theta))


def _central_gradient(objective, theta, bounds):
    gradient = np.empty(len(theta))
    for axis, (low, high) in enumerate(bounds):
        step = StenosisConstants.GRADIENT_STEP_FRACTION * (high - low)
        upper, lower = theta.copy(), theta.copy()
        upper[axis] = min(theta[axis] + step, high)
        lower[axis] = max(theta[axis] - step, low)
        gradient[axis] = (objective(upper) - objective(lower)) / (upper[axis] - lower[axis])
    return gradient


def optimize_params(profile, bounds=None, grid_points=StenosisConstants.GRID_POINTS,
                    jobs=1, peaks=None):
    """Fit the regression parameters of one vessel.

    Stage one evaluates the loss on a grid_points^3 grid, log-uniform
    within the bounds; ties resolve to the smallest parameter triple.
    Stage two refines the grid optimum with bounded L-BFGS-B using
    central-difference gradients. kappa is fixed by compute_kappa.

    :param profile: RadiusProfile (uniformly sampled)
    :param bounds: dict name -> (low, high); the configured defaults when None
    :param grid_points: grid resolution per axis
    :param jobs: worker processes for the grid stage
    :param peaks: optional precomputed PeakSet
    :return: OptimizationResult holding the lower-loss stage

    """

    publish_coronary_metric('analysis.stenosis.optimize_params')
    bounds = bounds or default_bounds()
    limits = [tuple(float(v) for v in bounds[name]) for name in PARAM_NAMES]
    for low, high in limits:
        if not (np.isfinite(low) and np.isfinite(high) and 0 < low <= high):
            raise ValueError('invalid parameter bounds {}'.format(limits))

    kappa = compute_kappa(profile)
    peaks = peaks or detect_peaks(profile)
    objective = RegressionObjective(profile, kappa, peaks.indices)
    flags = list(peaks.flags)

    log_ranges = tuple((np.log(low), np.log(high)) for low, high in limits)
    log_best, grid_loss, _, _ = optimize.brute(
        _LogObjective(objective), log_ranges, Ns=grid_points, full_output=True,
        finish=None, workers=jobs)
    grid_theta = np.clip(np.exp(np.atleast_1d(log_best)), [l for l, _ in limits],
                         [h for _, h in limits])
    grid_loss = objective(grid_theta)
    grid_params = RegressionParams(*(float(v) for v in grid_theta), kappa)
    logger.debug('grid optimum {} loss {:.3e}'.format(grid_params, grid_loss))

    refined_loss = np.nan
    best_theta, best_loss = grid_theta, grid_loss
    with np.errstate(all='ignore'):
        try:
            refined = optimize.minimize(
                objective, grid_theta, method='L-BFGS-B',
                jac=lambda theta: _central_gradient(objective, theta, limits),
                bounds=limits)
            refined_theta = np.clip(refined.x, [l for l, _ in limits], [h for _, h in limits])
            refined_loss = objective(refined_theta)
        except (ValueError, FloatingPointError) as error:
            logger.warning('L-BFGS-B refinement failed: {}'.format(error))
            refined_loss = np.nan
    if not np.isfinite(refined_loss):
        flags.append('refinement_non_finite')
        logger.warning('non-finite loss during refinement; keeping the grid optimum')
    elif refined_loss < grid_loss:
        best_theta, best_loss = refined_theta, refined_loss

    return OptimizationResult(params=RegressionParams(*(float(v) for v in best_theta), kappa),
                              loss=float(best_loss), grid_params=grid_params,
                              grid_loss=float(grid_loss), refined_loss=float(refined_loss),
                              peaks=peaks, flags=tuple(flags))
