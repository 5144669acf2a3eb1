"""Pipeline stages: each reads its inputs from files and writes its outputs to files."""

import collections
import json
import logging
import os

import pandas as pd

from coronary.version import __version__
from coronary.miscellaneous.convert import config_hash, write_json
from coronary.miscellaneous.errors import CoronaryError, EmptyRoiError, MissingInputError
from coronary.analysis.geometry.actions import BranchName, Classification, load_tree, \
    classify_tree, apply_overrides
from coronary.analysis.stenosis.actions import analyze_vessel, write_lesions_csv, \
    write_regression_dump, read_lesions_csv
from coronary.analysis.pcat.actions import load_volume, load_mask, volume_paths, vessel_roi, \
    lesion_roi, measure_roi, write_pcat_csv, read_pcat_rows
from coronary.analysis.classifier.actions import FeatureTable, build_feature_table, metrics_report
from .constants import Stage, INPUT_FILES, OUTPUT_FILES, SIDES, VOLUME_INPUTS

logger = logging.getLogger(__name__)

StageResult = collections.namedtuple('StageResult', ['stage', 'outputs', 'flags', 'errors'])


def provenance(config):
    return {'config_hash': config_hash(config), 'version': __version__}


def provenance_header(config):
    """First-line comment of every CSV output."""
    return 'config_hash={} version={}'.format(config_hash(config), __version__)


def input_path(case_dir, key, required=True):
    """Path of a case input file.

    :raises MissingInputError: the required file does not exist

    """

    path = os.path.join(case_dir, INPUT_FILES[key])
    files = volume_paths(path) if key in VOLUME_INPUTS else (path,)
    for name in files:
        if required and not os.path.exists(name):
            raise MissingInputError('missing input file {}'.format(name))
    return path


def _output(out_dir, key):
    return os.path.join(out_dir, OUTPUT_FILES[key])


def _read_output(out_dir, key):
    path = _output(out_dir, key)
    if not os.path.exists(path):
        raise MissingInputError('missing stage output {}; run the earlier stages first'.format(path))
    return path


def load_case_trees(case_dir):
    """Centerline trees of the case keyed by side; at least one side must exist."""
    trees = {}
    for side in SIDES:
        path = input_path(case_dir, side, required=False)
        if os.path.exists(path):
            trees[side] = load_tree(path)
    if not trees:
        raise MissingInputError('missing input file {} and {}'.format(
            input_path(case_dir, 'right', False), input_path(case_dir, 'left', False)))
    return trees


def _classifications(out_dir):
    with open(_read_output(out_dir, 'classification')) as fh:
        document = json.load(fh)
    return {side: Classification.from_dict(document[side]) for side in SIDES if side in document}


def _labelled_vessels(trees, classifications, flags):
    """(branch, centerline, classification) of every labelled major branch, RCA first."""
    vessels = []
    for side in SIDES:
        if side not in classifications:
            continue
        classification = classifications[side]
        for name, index in classification.labels.items():
            if index is None:
                flags.append('{}_unlabelled'.format(name.value))
                continue
            vessels.append((name.value, trees[side].centerlines[index], classification))
    return vessels


def stage_classify(case_dir, out_dir, config, overrides=None, jobs=1):
    """Label the RCA, LAD and LCx of every tree of the case.

    :param overrides: optional {"left": {...}, "right": {...}} manual corrections
    :return: StageResult

    """

    trees = load_case_trees(case_dir)
    overrides = overrides or {}
    unknown = sorted(set(overrides) - set(SIDES))
    if unknown:
        raise ValueError('override keys must be "left" or "right", got {}'.format(unknown))

    document, flags = provenance(config), []
    for side, tree in trees.items():
        result = classify_tree(tree, config)
        if side in overrides:
            result = apply_overrides(result, overrides[side])
        flags.extend('{}:{}'.format(side, flag) for flag in result.flags)
        document[side] = result.as_dict()
        logger.info('{} tree: {}'.format(side, {name.value: index
                                                for name, index in result.labels.items()}))
    write_json(_output(out_dir, 'classification'), document)
    return StageResult(Stage.CLASSIFY, [OUTPUT_FILES['classification']], flags, [])


def stage_stenosis(case_dir, out_dir, config, overrides=None, jobs=1):
    """Regression, stenosis degree and lesions of every labelled vessel.

    The RCA of a tree is analyzed up to its end abscissa.

    :return: StageResult

    """

    trees = load_case_trees(case_dir)
    flags, errors = [], []
    reports, lesions = [], []
    for branch, centerline, classification in _labelled_vessels(
            trees, _classifications(out_dir), flags):
        end_mm = classification.rca_end_mm if branch == BranchName.RCA.value else None
        try:
            report = analyze_vessel(centerline, branch, config, end_mm, jobs)
        except (CoronaryError, ValueError) as error:
            logger.error('{}: {}'.format(branch, error))
            errors.append('{}: {}'.format(branch, error))
            continue
        reports.append(report)
        lesions.extend(report.lesions)
        flags.extend('{}:{}'.format(branch, flag) for flag in report.flags)

    write_lesions_csv(lesions, _output(out_dir, 'lesions'), provenance_header(config))
    write_regression_dump(reports, _output(out_dir, 'regression'), provenance(config))
    logger.info('{} lesion(s) in {} vessel(s)'.format(len(lesions), len(reports)))
    return StageResult(Stage.STENOSIS, [OUTPUT_FILES['lesions'], OUTPUT_FILES['regression']],
                       flags, errors)


def stage_pcat(case_dir, out_dir, config, overrides=None, jobs=1):
    """Per-vessel and per-lesion PCAT features.

    A vessel too short for its window is flagged 'roi_empty' and skipped.

    :return: StageResult

    """

    volume = load_volume(input_path(case_dir, 'ct'))
    lumen = load_mask(input_path(case_dir, 'lumen'))
    trees = load_case_trees(case_dir)
    classifications = _classifications(out_dir)
    with open(_read_output(out_dir, 'regression')) as fh:
        regression = {vessel['branch']: vessel for vessel in json.load(fh)['vessels']}
    lesions = read_lesions_csv(_read_output(out_dir, 'lesions'))

    flags, rows, centerlines = [], [], {}
    left = classifications.get('left')
    bifurcation_mm = (left.bifurcation_mm if left is not None else None) or 0.0
    for branch, centerline, _ in _labelled_vessels(trees, classifications, flags):
        centerlines[branch] = centerline
        try:
            roi = vessel_roi(branch, centerline, bifurcation_mm, config)
        except EmptyRoiError as error:
            logger.warning('{}: {}'.format(branch, error))
            flags.append('{}:roi_empty'.format(branch))
            continue
        _, row = measure_roi(roi, volume, lumen, config, jobs)
        rows.append(row)

    for lesion in lesions:
        vessel = regression[lesion.branch]
        roi = lesion_roi(lesion, centerlines[lesion.branch], vessel['abscissa'], vessel['r_h'],
                         config)
        _, row = measure_roi(roi, volume, lumen, config, jobs)
        rows.append(row)

    for row in rows:
        label = row.branch if not row.lesion_id else '{}#{}'.format(row.branch, row.lesion_id)
        flags.extend('{}:{}'.format(label, flag) for flag in row.flags)
    write_pcat_csv(rows, _output(out_dir, 'pcat'), provenance_header(config))
    return StageResult(Stage.PCAT, [OUTPUT_FILES['pcat']], flags, [])


def stage_features(case_dir, out_dir, config, overrides=None, jobs=1):
    """Per-lesion feature table; functional columns join when functional.csv exists.

    :return: StageResult

    """

    flags = []
    lesions = read_lesions_csv(_read_output(out_dir, 'lesions'))
    pcat_path = _output(out_dir, 'pcat')
    pcat_rows = read_pcat_rows(pcat_path) if os.path.exists(pcat_path) else []
    if not os.path.exists(pcat_path):
        flags.append('pcat_missing')
    functional_path = input_path(case_dir, 'functional', required=False)
    functional = None
    if os.path.exists(functional_path):
        functional = pd.read_csv(functional_path, comment='#', dtype={'branch': str})
    else:
        flags.append('functional_missing')
    patient = os.path.basename(os.path.normpath(case_dir))
    table = build_feature_table(lesions, pcat_rows, functional, patient)
    table.to_csv(_output(out_dir, 'features'), provenance_header(config))
    return StageResult(Stage.FEATURES, [OUTPUT_FILES['features']], flags, [])


def stage_metrics(case_dir, out_dir, config, overrides=None, jobs=1):
    """Classifier metrics of the case feature table, when it carries labels.

    Pairs that cannot be trained (a single case rarely holds both
    classes) are reported in metrics.json and flagged, not raised.

    :return: StageResult

    """

    table = FeatureTable.from_csv(_read_output(out_dir, 'features'))
    if not table.has_functional or table.frame['vffr'].isna().all():
        logger.info('no functional values, metrics skipped')
        return StageResult(Stage.METRICS, [], ['no_labels'], [])
    report, _ = metrics_report(table, config, jobs=jobs)
    flags = ['{}:untrainable'.format(key) for key, entry in sorted(report.items())
             if 'error' in entry]
    document = provenance(config)
    document['pairs'] = report
    write_json(_output(out_dir, 'metrics'), document)
    return StageResult(Stage.METRICS, [OUTPUT_FILES['metrics']], flags, [])
