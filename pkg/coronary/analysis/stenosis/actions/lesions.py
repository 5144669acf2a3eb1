"""Lesion extraction, filtering and morphometrics."""

import collections
import logging

import numpy as np
import pandas as pd

from coronary.metrics.metrics import publish_coronary_metric
from coronary.miscellaneous.convert import write_json
from .constants import StenosisConstants, LESION_COLUMNS
from .optimization import optimize_params
from .profile import RadiusProfile
from .regression import healthy_radius, stenosis_degree, default_bounds

logger = logging.getLogger(__name__)

LesionInterval = collections.namedtuple('LesionInterval', ['start', 'end', 'peak'])

Lesion = collections.namedtuple('Lesion', LESION_COLUMNS)

VesselReport = collections.namedtuple(
    'VesselReport',
    ['branch', 'profile', 'optimization', 'intermediates', 'sd', 'intervals', 'lesions', 'flags'])


def _runs(mask):
    """(start, end) index pairs, inclusive, of the True runs of a mask."""
    padded = np.concatenate(([False], mask, [False])).astype(int)
    edges = np.flatnonzero(np.diff(padded))
    return list(zip(edges[0::2], edges[1::2] - 1))


def detect_lesions(sd, profile, sd_core=StenosisConstants.SD_CORE,
                   sd_extend=StenosisConstants.SD_EXTEND,
                   filter_diameters=StenosisConstants.FILTER_DIAMETERS,
                   min_length=StenosisConstants.MIN_LENGTH_MM):
    """Stenotic intervals of a vessel.

    Runs with SD above sd_core are extended while SD stays above
    sd_extend; overlapping or touching intervals merge. Intervals whose
    most stenotic point lies within filter_diameters local diameters of
    either vessel end, or shorter than min_length, are dropped. The local
    diameter is twice the mean healthy radius r / (1 - SD) over the
    interval.

    :param sd: StenosisProfile or per-point SD array
    :param profile: RadiusProfile aligned with sd
    :return: sorted list of disjoint LesionInterval

    """

    sd = np.asarray(getattr(sd, 'sd', sd), dtype=float)
    if sd.shape != profile.radius.shape:
        raise ValueError('stenosis degree is not aligned with the profile')
    n = len(sd)

    extended = []
    for start, end in _runs(sd > sd_core):
        while start > 0 and sd[start - 1] > sd_extend:
            start -= 1
        while end < n - 1 and sd[end + 1] > sd_extend:
            end += 1
        extended.append([start, end])

    merged = []
    for start, end in sorted(extended):
        if merged and start <= merged[-1][1] + 1:
            merged[-1][1] = max(merged[-1][1], end)
        else:
            merged.append([start, end])

    gamma = profile.abscissa
    healthy = profile.radius / (1.0 - sd)
    kept = []
    for start, end in merged:
        peak = start + int(np.argmax(sd[start:end + 1]))
        diameter = 2.0 * float(np.mean(healthy[start:end + 1]))
        length = gamma[end] - gamma[start]
        if gamma[peak] - gamma[0] < filter_diameters * diameter:
            logger.debug('dropping ostial lesion at {:.1f} mm'.format(gamma[peak]))
            continue
        if gamma[-1] - gamma[peak] < filter_diameters * diameter:
            logger.debug('dropping distal lesion at {:.1f} mm'.format(gamma[peak]))
            continue
        if length < min_length:
            logger.debug('dropping {:.2f} mm lesion at {:.1f} mm'.format(length, gamma[peak]))
            continue
        kept.append(LesionInterval(start=int(start), end=int(end), peak=int(peak)))
    return kept


def lesion_morphometrics(interval, profile, sd, centerline=None, branch='', lesion_id=0,
                         ostium_mm=0.0):
    """Morphological parameters of one lesion.

    :param interval: LesionInterval on the profile
    :param profile: RadiusProfile
    :param sd: StenosisProfile or SD array
    :param centerline: Centerline carrying the profile; a straight vessel
                       (tortuosity 1) is assumed when None
    :param branch: branch label value
    :param lesion_id: running id within the vessel
    :param ostium_mm: abscissa of the ostium on the profile
    :return: Lesion

    """

    sd = np.asarray(getattr(sd, 'sd', sd), dtype=float)
    start_mm = float(profile.abscissa[interval.start])
    end_mm = float(profile.abscissa[interval.end])
    window = slice(interval.start, interval.end + 1)
    arc = end_mm - start_mm
    tortuosity = 1.0
    if centerline is not None and arc > 0:
        chord = np.linalg.norm(centerline.point_at(end_mm) - centerline.point_at(start_mm))
        tortuosity = min(float(chord / arc), 1.0)
    return Lesion(branch=branch, lesion_id=int(lesion_id), start_mm=start_mm, end_mm=end_mm,
                  max_sd=float(np.max(sd[window])), length_mm=arc,
                  mla_mm2=float(np.pi * np.min(profile.radius[window]) ** 2),
                  dist_ostium_mm=float(profile.abscissa[interval.peak] - ostium_mm),
                  tortuosity=tortuosity)


def analyze_vessel(centerline, branch, config=None, end_mm=None, jobs=1):
    """Regression, stenosis degree and lesions of one classified vessel.

    :param centerline: Centerline
    :param branch: branch label value, e.g. 'LAD'
    :param config: optional Munch with a 'stenosis' section
    :param end_mm: truncate the vessel here (RCA of right-dominant trees)
    :param jobs: worker processes for the grid stage
    :return: VesselReport

    """

    publish_coronary_metric('analysis.stenosis.analyze_vessel')
    settings = (config or {}).get('stenosis', {})
    spacing = settings.get('resample_mm', StenosisConstants.RESAMPLE_MM)
    profile = RadiusProfile.from_centerline(centerline, end_mm).resample(spacing)
    logger.info('{}: {} samples over {:.1f} mm'.format(branch, profile.n, profile.abscissa[-1]))

    optimization = optimize_params(profile, default_bounds(config),
                                   settings.get('grid_points', StenosisConstants.GRID_POINTS),
                                   jobs=jobs)
    intermediates = healthy_radius(profile, optimization.params)
    sd = stenosis_degree(profile, intermediates.r_h)
    intervals = detect_lesions(
        sd, profile,
        settings.get('sd_core', StenosisConstants.SD_CORE),
        settings.get('sd_extend', StenosisConstants.SD_EXTEND),
        settings.get('filter_diameters', StenosisConstants.FILTER_DIAMETERS),
        settings.get('min_length_mm', StenosisConstants.MIN_LENGTH_MM))
    lesions = [lesion_morphometrics(interval, profile, sd, centerline, branch, lesion_id)
               for lesion_id, interval in enumerate(intervals, start=1)]
    flags = optimization.flags + intermediates.flags
    for flag in flags:
        logger.warning('{}: {}'.format(branch, flag))
    logger.info('{}: {} lesion(s), params {}'.format(branch, len(lesions), optimization.params))
    return VesselReport(branch=branch, profile=profile, optimization=optimization,
                        intermediates=intermediates, sd=sd, intervals=intervals,
                        lesions=lesions, flags=flags)


def regression_dump(report):
    """Per-vessel arrays of the regression for debugging."""
    return {
        'branch': report.branch,
        'params': report.optimization.params._asdict(),
        'loss': report.optimization.loss,
        'grid_params': report.optimization.grid_params._asdict(),
        'grid_loss': report.optimization.grid_loss,
        'peaks': report.optimization.peaks.indices,
        'abscissa': report.profile.abscissa,
        'r': report.profile.radius,
        'r_max': report.intermediates.r_max,
        'w': report.intermediates.w,
        'r_h': report.intermediates.r_h,
        'sd': report.sd.sd,
        'lesion_count': len(report.lesions),
        'flags': list(report.flags),
    }


def write_regression_dump(reports, path, provenance=None):
    document = {'vessels': [regression_dump(report) for report in reports]}
    document.update(provenance or {})
    write_json(path, document)


def lesions_frame(lesions):
    return pd.DataFrame([lesion._asdict() for lesion in lesions], columns=LESION_COLUMNS)


def write_lesions_csv(lesions, path, header=None):
    """Lesion report, one row per lesion.

    :param lesions: list of Lesion
    :param path: output CSV
    :param header: optional provenance comment written as the first line

    """

    with open(path, 'w') as fh:
        if header:
            fh.write('# {}\n'.format(header))
        lesions_frame(lesions).to_csv(fh, index=False, float_format='%.17g', lineterminator='\n')


def read_lesions_csv(path):
    frame = pd.read_csv(path, comment='#')
    return [Lesion(**row) for row in frame.to_dict('records')]
