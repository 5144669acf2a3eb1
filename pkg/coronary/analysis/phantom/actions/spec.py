"""Phantom specifications and ground truth records."""

import collections

import munch
import numpy as np

from coronary.miscellaneous.errors import PhantomSpecError
from .constants import PhantomConstants, LesionShape, TreeTemplate, LabelRule

LesionSpec = collections.namedtuple('LesionSpec', ['center_mm', 'depth', 'width_mm', 'shape'])
LesionSpec.__new__.__defaults__ = (LesionShape.GAUSSIAN.value,)

GridSpec = collections.namedtuple('GridSpec', ['spacing', 'dims', 'origin'])
GridSpec.__new__.__defaults__ = (None, None)


def lesion_support(lesion):
    """Half extent of a lesion shape: 2 sigma (width / 2) for both shapes."""
    return lesion.width_mm / 2.0


class HuSampler:
    """Discrete HU distribution."""

    def __init__(self, values=PhantomConstants.FAT_HU_VALUES,
                 weights=PhantomConstants.FAT_HU_WEIGHTS):
        values = np.asarray(values, dtype=np.int64)
        weights = np.asarray(weights, dtype=float)
        low, high = PhantomConstants.HU_RANGE
        if values.ndim != 1 or values.shape != weights.shape or not len(values):
            raise PhantomSpecError('HU sampler needs one weight per value')
        if np.any(values < low) or np.any(values > high):
            raise PhantomSpecError('HU sampler support must lie in [{}, {}]'.format(low, high))
        if np.any(weights < 0) or weights.sum() <= 0:
            raise PhantomSpecError('HU sampler weights must be >= 0 and not all zero')
        self.values = values
        self.weights = weights / weights.sum()

    @classmethod
    def constant(cls, value):
        return cls([value], [1.0])

    def sample(self, rng, size):
        return rng.choice(self.values, size=size, p=self.weights).astype(np.int16)

    def as_dict(self):
        return {'values': self.values.tolist(), 'weights': self.weights.tolist()}


class PhantomSpec:
    """Everything a phantom generator needs; generators are pure in (spec, seed).

    :param seed: random seed
    :param length_mm: vessel length of radius profiles
    :param radius_mm: baseline radius at the ostium
    :param taper_mm: radius lost linearly over the vessel length
    :param ripple: relative amplitude of a sinusoidal baseline ripple
    :param lesions: LesionSpec list (center, depth fraction, width, shape)
    :param template: TreeTemplate of generated trees
    :param hu_sampler: HuSampler of the fat annulus
    :param grid: GridSpec; a grid fitted to the ROI when dims are None
    :param spacing_mm: profile sampling step
    """

    def __init__(self, seed=0, length_mm=60.0, radius_mm=1.5, taper_mm=0.0, ripple=0.0,
                 ripple_period_mm=PhantomConstants.RIPPLE_PERIOD_MM, lesions=(),
                 template=TreeTemplate.LEFT, hu_sampler=None, grid=None,
                 spacing_mm=PhantomConstants.PROFILE_SPACING_MM):
        self.seed = int(seed)
        self.length_mm = float(length_mm)
        self.radius_mm = float(radius_mm)
        self.taper_mm = float(taper_mm)
        self.ripple = float(ripple)
        self.ripple_period_mm = float(ripple_period_mm)
        self.lesions = tuple(LesionSpec(*lesion) if not isinstance(lesion, LesionSpec) else lesion
                             for lesion in lesions)
        self.template = TreeTemplate(template)
        self.hu_sampler = hu_sampler or HuSampler()
        self.grid = grid or GridSpec(spacing=0.4)
        self.spacing_mm = float(spacing_mm)
        self.validate()

    def validate(self):
        if self.length_mm <= 0 or self.spacing_mm <= 0:
            raise PhantomSpecError('length and spacing must be > 0')
        if self.radius_mm <= 0 or self.radius_mm - self.taper_mm <= 0:
            raise PhantomSpecError('baseline radius must stay > 0 over the vessel')
        if not 0 <= self.ripple < 0.5:
            raise PhantomSpecError('ripple amplitude must be in [0, 0.5)')
        for lesion in self.lesions:
            LesionShape(lesion.shape)
            if not 0 < lesion.depth < 1:
                raise PhantomSpecError('lesion depth must be in (0, 1), got {}'.format(lesion.depth))
            if lesion.width_mm <= PhantomConstants.MIN_LESION_WIDTH_MM:
                raise PhantomSpecError('lesion width must exceed {} mm, got {}'.format(
                    PhantomConstants.MIN_LESION_WIDTH_MM, lesion.width_mm))
        ordered = sorted(self.lesions, key=lambda lesion: lesion.center_mm)
        for first, second in zip(ordered, ordered[1:]):
            if first.center_mm + lesion_support(first) > second.center_mm - lesion_support(second):
                raise PhantomSpecError('lesions at {} and {} mm overlap'.format(
                    first.center_mm, second.center_mm))

    def as_dict(self):
        return {
            'seed': self.seed,
            'length_mm': self.length_mm,
            'radius_mm': self.radius_mm,
            'taper_mm': self.taper_mm,
            'ripple': self.ripple,
            'ripple_period_mm': self.ripple_period_mm,
            'lesions': [lesion._asdict() for lesion in self.lesions],
            'template': self.template.value,
            'hu_sampler': self.hu_sampler.as_dict(),
            'grid': self.grid._asdict(),
            'spacing_mm': self.spacing_mm,
        }


class DatasetSpec:
    """Synthetic lesion feature table with a planted label rule.

    :param seed: random seed
    :param rows: lesion count
    :param patients: patient count; lesions are spread over patients
    :param rule: LabelRule
    :param signal_features: features the rule reads
    :param weights: linear rule weights, one per signal feature
    :param noise: standard deviation of the logit noise of the rule
    """

    def __init__(self, seed=0, rows=200, patients=60, rule=LabelRule.LINEAR,
                 signal_features=('max_sd', 'fai'), weights=None, noise=0.0):
        self.seed = int(seed)
        self.rows = int(rows)
        self.patients = int(patients)
        self.rule = LabelRule(rule)
        self.signal_features = tuple(signal_features)
        self.weights = tuple(weights) if weights is not None else (1.0,) * len(self.signal_features)
        self.noise = float(noise)
        if self.rows < 2 or not 1 <= self.patients <= self.rows:
            raise PhantomSpecError('need rows >= 2 and 1 <= patients <= rows')
        if len(self.weights) != len(self.signal_features):
            raise PhantomSpecError('one weight per signal feature expected')
        if self.rule is LabelRule.XOR and len(self.signal_features) != 2:
            raise PhantomSpecError('the xor rule reads exactly two signal features')

    def as_dict(self):
        return {'seed': self.seed, 'rows': self.rows, 'patients': self.patients,
                'rule': self.rule.value, 'signal_features': list(self.signal_features),
                'weights': list(self.weights), 'noise': self.noise}


def ground_truth(**fields):
    """Attribute-style ground truth record."""
    return munch.Munch(fields)
