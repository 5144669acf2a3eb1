"""Complete synthetic cases: both trees, CT and lumen volumes, functional values, truth."""

import logging
import os

import numpy as np
import pandas as pd

from coronary.metrics.metrics import publish_coronary_metric
from coronary.miscellaneous.convert import write_json
from coronary.analysis.geometry.actions import save_tree
from coronary.analysis.pcat.actions import TubeROI, RoiKind, PcatConstants, save_volume, save_mask
from coronary.analysis.pipeline.actions.constants import INPUT_FILES
from .constants import TreeTemplate
from .spec import PhantomSpec, GridSpec, LesionSpec, ground_truth
from .tree import gen_coronary_tree
from .volume import gen_pcat_volume

logger = logging.getLogger(__name__)

LEFT_OSTIUM = (15.0, 0.0, 0.0)
RIGHT_OSTIUM = (-15.0, -5.0, 0.0)
RIPPLE = 0.02
FAT_RADIUS_FACTOR = 3.5
WINDOW_MARGIN_MM = 5.0

CASE_FILES = dict(INPUT_FILES, truth='truth.json')


def _functional_values(depth):
    """Functional values growing with the lesion depth."""
    return {'vffr': 1.0 - 0.35 * depth, 'wss': 35.0 * depth, 'dffr': 0.12 * depth}


def _lesion_plan(left_truth, right_template):
    """Planted lesions keyed by builder branch, with the major label they sit on."""
    b = left_truth.bifurcation_mm
    rca = 'RCA' if right_template is TreeTemplate.LEFT_DOMINANT else 'TRUNK'
    return [
        ('left', 'LAD', 'LAD', LesionSpec(b + 28.0, 0.50, 8.0)),
        ('left', 'LCx', 'LCx', LesionSpec(b + 18.0, 0.40, 7.0)),
        ('right', rca, 'RCA', LesionSpec(30.0, 0.60, 8.0)),
    ]


def _fat_window(label, healthy, lesioned, start):
    low = max(start - WINDOW_MARGIN_MM, 0.0)
    high = min(start + PcatConstants.ROI_LENGTH_MM + WINDOW_MARGIN_MM, healthy.length)
    points, radius, abscissa = healthy.section(low, high)
    lumen = np.interp(abscissa, lesioned.abscissa, lesioned.radius)
    return TubeROI(points, FAT_RADIUS_FACTOR * radius, lumen, low, high, RoiKind.PER_VESSEL,
                   branch=label)


def gen_case(seed, right_template=TreeTemplate.RIGHT_DOMINANT, spacing=0.5, jobs=1):
    """Generate one case in memory.

    :param seed: case seed; the right tree uses seed + 1
    :param right_template: template of the right tree
    :param spacing: isotropic voxel spacing, mm
    :param jobs: rasterization threads
    :return: GroundTruth holding trees, volume, lumen, functional frame
             and the truth document

    """

    publish_coronary_metric('analysis.phantom.gen_case')
    right_template = TreeTemplate(right_template)
    specs = {'left': PhantomSpec(seed, template=TreeTemplate.LEFT, ripple=RIPPLE),
             'right': PhantomSpec(seed + 1, template=right_template, ripple=RIPPLE)}
    ostia = {'left': LEFT_OSTIUM, 'right': RIGHT_OSTIUM}
    healthy = {side: gen_coronary_tree(specs[side], ostia[side]) for side in specs}

    plan = _lesion_plan(healthy['left'][1], right_template)
    lesions = {'left': {}, 'right': {}}
    for side, name, _, lesion in plan:
        lesions[side].setdefault(name, []).append(lesion)
    trees = {side: gen_coronary_tree(specs[side], ostia[side], lesions[side])[0] for side in specs}

    starts = {'RCA': PcatConstants.START_MM['RCA'],
              'LAD': healthy['left'][1].bifurcation_mm + PcatConstants.START_MM['LAD'],
              'LCx': healthy['left'][1].bifurcation_mm + PcatConstants.START_MM['LCx']}
    rois = []
    for side in ('right', 'left'):
        truth = healthy[side][1]
        for label, index in sorted(truth.labels.items()):
            if index is None or label not in starts:
                continue
            rois.append(_fat_window(label, healthy[side][0].centerlines[index],
                                    trees[side].centerlines[index], starts[label]))
    lumen_paths = [(c.points, c.radius) for side in ('right', 'left')
                   for c in trees[side].centerlines]
    volume, lumen, volume_truth = gen_pcat_volume(
        PhantomSpec(seed, grid=GridSpec(spacing)), rois, lumen_paths, jobs)

    functional = []
    planted = []
    for _, _, label, lesion in plan:
        record = {'branch': label, 'lesion_id': 1}
        record.update(_functional_values(lesion.depth))
        functional.append(record)
        planted.append(ground_truth(branch=label, lesion_id=1, center_mm=lesion.center_mm,
                                    depth=lesion.depth, width_mm=lesion.width_mm,
                                    shape=lesion.shape, **_functional_values(lesion.depth)))
    frame = pd.DataFrame(functional, columns=['branch', 'lesion_id', 'vffr', 'wss', 'dffr'])

    document = ground_truth(seed=seed, left=healthy['left'][1], right=healthy['right'][1],
                            lesions=planted, volume=volume_truth)
    logger.info('case {}: {} lesions, grid {}'.format(seed, len(planted), volume.grid.dims))
    return ground_truth(trees=trees, volume=volume, lumen=lumen, functional=frame,
                        truth=document)


def write_case(directory, seed, right_template=TreeTemplate.RIGHT_DOMINANT, spacing=0.5, jobs=1):
    """Generate a case and write its input files and truth.json.

    :return: the truth document

    """

    case = gen_case(seed, right_template, spacing, jobs)
    os.makedirs(directory, exist_ok=True)

    def path(key):
        return os.path.join(directory, CASE_FILES[key])

    save_tree(case.trees['left'], path('left'))
    save_tree(case.trees['right'], path('right'))
    save_volume(case.volume, path('ct'))
    save_mask(case.lumen, path('lumen'))
    case.functional.to_csv(path('functional'), index=False, float_format='%.17g',
                           lineterminator='\n')
    write_json(path('truth'), case.truth)
    logger.info('phantom case written to {}'.format(directory))
    return case.truth
