"""Radius profiles sampled along a centerline."""

import logging

import numpy as np

from coronary.miscellaneous.errors import DegenerateGeometryError
from .constants import StenosisConstants

logger = logging.getLogger(__name__)


class RadiusProfile:
    """Observed radius r_i at strictly increasing abscissa values."""

    def __init__(self, abscissa, radius):
        abscissa = np.array(abscissa, dtype=float)
        radius = np.array(radius, dtype=float)
        if abscissa.shape != radius.shape or abscissa.ndim != 1:
            raise DegenerateGeometryError('abscissa and radius must be aligned 1-D arrays')
        if len(radius) < StenosisConstants.MIN_POINTS:
            raise DegenerateGeometryError('a radius profile needs at least {} points, got {}'.format(
                StenosisConstants.MIN_POINTS, len(radius)))
        if np.any(np.diff(abscissa) <= 0):
            raise DegenerateGeometryError('abscissa must be strictly increasing')
        if not np.all(np.isfinite(radius)) or np.any(radius <= 0):
            raise DegenerateGeometryError('radii must be finite and > 0')
        abscissa.setflags(write=False)
        radius.setflags(write=False)
        self.abscissa = abscissa
        self.radius = radius

    @property
    def n(self):
        return len(self.radius)

    def __len__(self):
        return self.n

    @classmethod
    def from_centerline(cls, centerline, end_mm=None):
        """Profile of a centerline, optionally truncated at end_mm."""
        if end_mm is None or end_mm >= centerline.length:
            return cls(centerline.abscissa, centerline.radius)
        _, radius, abscissa = centerline.section(0.0, end_mm)
        return cls(abscissa, radius)

    def resample(self, spacing=StenosisConstants.RESAMPLE_MM):
        """Linear resampling on a uniform abscissa grid.

        :param spacing: grid step, mm
        :return: RadiusProfile starting at the same abscissa

        """

        start, stop = self.abscissa[0], self.abscissa[-1]
        count = int(np.floor((stop - start) / spacing + 1e-9)) + 1
        abscissa = start + spacing * np.arange(count)
        return RadiusProfile(abscissa, np.interp(abscissa, self.abscissa, self.radius))
