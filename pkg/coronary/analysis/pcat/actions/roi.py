"""Pericoronary tube regions of interest."""

import logging

import numpy as np

from coronary.miscellaneous.errors import EmptyRoiError
from coronary.metrics.metrics import publish_coronary_metric
from .constants import PcatConstants, RoiKind

logger = logging.getLogger(__name__)


class TubeROI:
    """A tube around a centerline section.

    :param points: (m, 3) path positions, mm
    :param outer_radius: (m,) tube radius per path point, mm
    :param lumen_radius: (m,) lumen radius per path point, mm
    :param start_mm: start abscissa on the parent centerline
    :param end_mm: end abscissa on the parent centerline
    :param kind: RoiKind
    """

    def __init__(self, points, outer_radius, lumen_radius, start_mm, end_mm, kind,
                 branch='', lesion_id=0, flags=()):
        points = np.array(points, dtype=float)
        outer_radius = np.array(outer_radius, dtype=float)
        lumen_radius = np.array(lumen_radius, dtype=float)
        if points.ndim != 2 or points.shape[1] != 3 or len(points) < 2:
            raise ValueError('a tube path needs at least two 3D points')
        if outer_radius.shape != (len(points),) or lumen_radius.shape != (len(points),):
            raise ValueError('one outer and lumen radius per path point expected')
        if np.any(outer_radius <= lumen_radius):
            raise ValueError('outer radius must exceed the lumen radius at every point')
        if not end_mm > start_mm:
            raise ValueError('empty tube [{}, {}]'.format(start_mm, end_mm))
        for array in (points, outer_radius, lumen_radius):
            array.setflags(write=False)
        self.points = points
        self.outer_radius = outer_radius
        self.lumen_radius = lumen_radius
        self.start_mm = float(start_mm)
        self.end_mm = float(end_mm)
        self.kind = RoiKind(kind)
        self.branch = branch
        self.lesion_id = int(lesion_id)
        self.flags = tuple(flags)

    @property
    def length(self):
        return self.end_mm - self.start_mm

    def translated(self, offset):
        return TubeROI(self.points + np.asarray(offset, dtype=float), self.outer_radius,
                       self.lumen_radius, self.start_mm, self.end_mm, self.kind, self.branch,
                       self.lesion_id, self.flags)

    def scaled_outer(self, factor):
        return TubeROI(self.points, self.outer_radius * factor, self.lumen_radius,
                       self.start_mm, self.end_mm, self.kind, self.branch, self.lesion_id,
                       self.flags)


def vessel_roi(branch, centerline, bifurcation_mm=0.0, config=None):
    """Per-vessel ROI: a fixed-length window past the branch start rule.

    The RCA window starts rca_start_mm past the ostium; LAD and LCx
    windows start lad_start_mm and lcx_start_mm past the left main
    bifurcation. The outer radius is radius_factor times the local
    lumen radius.

    :param branch: 'RCA', 'LAD' or 'LCx'
    :param centerline: Centerline of the labelled branch
    :param bifurcation_mm: abscissa of the left main bifurcation
    :param config: optional Munch with a 'pcat' section
    :return: TubeROI, flagged 'roi_truncated' when the branch is too short

    """

    publish_coronary_metric('analysis.pcat.vessel_roi')
    settings = (config or {}).get('pcat', {})
    offsets = {'RCA': settings.get('rca_start_mm', PcatConstants.START_MM['RCA']),
               'LAD': settings.get('lad_start_mm', PcatConstants.START_MM['LAD']),
               'LCx': settings.get('lcx_start_mm', PcatConstants.START_MM['LCx'])}
    if branch not in offsets:
        raise ValueError('no PCAT window rule for branch {}'.format(branch))
    length = settings.get('roi_length_mm', PcatConstants.ROI_LENGTH_MM)
    factor = settings.get('radius_factor', PcatConstants.RADIUS_FACTOR)

    start = offsets[branch] + (0.0 if branch == 'RCA' else float(bifurcation_mm))
    end = start + length
    if start >= centerline.length:
        raise EmptyRoiError('{} is {:.1f} mm long, PCAT window starts at {:.1f} mm'.format(
            branch, centerline.length, start))
    flags = []
    if end > centerline.length:
        flags.append('roi_truncated')
        logger.warning('{} window truncated to [{:.1f}, {:.1f}] mm'.format(
            branch, start, centerline.length))
        end = centerline.length
    points, radius, _ = centerline.section(start, end)
    return TubeROI(points, factor * radius, radius, start, end, RoiKind.PER_VESSEL,
                   branch=branch, flags=flags)


def lesion_roi(lesion, centerline, abscissa, r_h, config=None):
    """Per-lesion ROI over the lesion extent.

    :param lesion: Lesion with start_mm/end_mm on the centerline
    :param centerline: Centerline carrying the lesion
    :param abscissa: abscissa of the healthy radius samples
    :param r_h: healthy radius per sample, mm
    :param config: optional Munch with a 'pcat' section
    :return: TubeROI with outer radius radius_factor * r_h

    """

    publish_coronary_metric('analysis.pcat.lesion_roi')
    factor = (config or {}).get('pcat', {}).get('radius_factor', PcatConstants.RADIUS_FACTOR)
    points, radius, path_abscissa = centerline.section(lesion.start_mm, lesion.end_mm)
    outer = factor * np.interp(path_abscissa, abscissa, r_h)
    flags = []
    narrow = outer <= radius
    if np.any(narrow):
        # an observed radius above factor * r_h keeps the tube just outside the lumen
        flags.append('roi_radius_clamped')
        logger.warning('{} lesion {}: tube radius clamped at {} points'.format(
            lesion.branch, lesion.lesion_id, int(narrow.sum())))
        outer = np.where(narrow, np.nextafter(radius, np.inf), outer)
    return TubeROI(points, outer, radius, path_abscissa[0], path_abscissa[-1],
                   RoiKind.PER_LESION, branch=lesion.branch, lesion_id=lesion.lesion_id,
                   flags=flags)
