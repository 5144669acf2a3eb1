"""End-to-end runs of one or several case directories."""

import collections
import logging
import os
from concurrent.futures import ProcessPoolExecutor

import pandas as pd

from coronary.miscellaneous.convert import write_json
from coronary.miscellaneous.errors import CoronaryError, MissingInputError
from coronary.miscellaneous.settings import load_config
from coronary.metrics.metrics import get_metric_counts, reset_metric_counts, \
    publish_coronary_metric
from coronary.analysis.classifier.actions import FeatureTable, metrics_report
from .constants import PIPELINE_STAGES, OUTPUT_FILES, COHORT_FILES
from .factory import Factory
from .stages import input_path, provenance, provenance_header, load_case_trees

logger = logging.getLogger(__name__)

RunReport = collections.namedtuple(
    'RunReport', ['case', 'out_dir', 'outputs', 'flags', 'errors', 'exit_code'])


def run_pipeline(case_dir, config=None, out_dir=None, overrides=None, jobs=None):
    """Run every stage on one case directory.

    Stages run in order; a stage that raises stops the run and later
    stages are skipped. summary.json lists the outputs, the flags of
    every stage, the errors, the metric counts of this case, the tool
    version and the config hash.

    :param case_dir: directory holding centerlines_*.json, ct.vol.*,
                     lumen.vol.* and optionally functional.csv
    :param config: Munch from load_config(); the packaged defaults when None
    :param out_dir: output directory; case_dir when None
    :param overrides: optional manual classification corrections
    :param jobs: workers inside the stages; [pipeline] jobs when None
    :return: RunReport, exit_code 0 iff no stage raised or reported an error
    :raises MissingInputError: a required input file is missing

    """

    config = config if config is not None else load_config()
    jobs = int(jobs if jobs is not None else config.pipeline.jobs)
    out_dir = out_dir or case_dir
    load_case_trees(case_dir)
    input_path(case_dir, 'ct')
    input_path(case_dir, 'lumen')
    os.makedirs(out_dir, exist_ok=True)

    reset_metric_counts()
    publish_coronary_metric('analysis.pipeline.run_pipeline')
    case = os.path.basename(os.path.normpath(case_dir))
    outputs, flags, errors = [], {}, []
    for stage in PIPELINE_STAGES:
        logger.info('{}: stage {}'.format(case, stage.value))
        try:
            result = Factory.factory_by_stage(stage, args=(case_dir, out_dir, config),
                                              kwargs={'overrides': overrides, 'jobs': jobs})
        except (CoronaryError, ValueError, OSError) as error:
            logger.error('{}: stage {} failed: {}'.format(case, stage.value, error))
            errors.append('{}: {}'.format(stage.value, error))
            break
        outputs.extend(result.outputs)
        flags[stage.value] = list(result.flags)
        errors.extend('{}: {}'.format(stage.value, error) for error in result.errors)
        for flag in result.flags:
            logger.warning('{}: {}: {}'.format(case, stage.value, flag))

    exit_code = 1 if errors else 0
    summary = provenance(config)
    summary.update({'case': case, 'outputs': outputs, 'flags': flags, 'errors': errors,
                    'metric_counts': get_metric_counts(), 'exit_code': exit_code})
    write_json(os.path.join(out_dir, OUTPUT_FILES['summary']), summary)
    outputs.append(OUTPUT_FILES['summary'])
    logger.info('{}: done, exit code {}'.format(case, exit_code))
    return RunReport(case, out_dir, outputs, flags, errors, exit_code)


def _run_case(task):
    case_dir, config, out_dir, overrides = task
    return run_pipeline(case_dir, config, out_dir, overrides, jobs=1)


def run_cases(case_dirs, config=None, out_root=None, overrides=None, jobs=1):
    """Run several cases, in parallel worker processes when jobs > 1.

    Every case gets its own process-local metric counts, so its summary
    does not depend on the other cases or on jobs. With more than one
    case the per-case feature tables are pooled and the classifier is
    trained once on the cohort, see run_cohort().

    :param case_dirs: list of case directories
    :param out_root: outputs go to out_root/<case name>; into each case
                     directory when None
    :return: list of RunReport in input order

    """

    config = config if config is not None else load_config()
    tasks = []
    for case_dir in case_dirs:
        out_dir = None
        if out_root is not None:
            out_dir = os.path.join(out_root, os.path.basename(os.path.normpath(case_dir)))
        tasks.append((case_dir, config, out_dir, overrides))

    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            reports = list(executor.map(_run_case, tasks))
    elif len(tasks) == 1:
        case_dir, config, out_dir, overrides = tasks[0]
        return [run_pipeline(case_dir, config, out_dir, overrides, jobs)]
    else:
        reports = [_run_case(task) for task in tasks]
    if not reports:
        return reports

    cohort_dir = out_root
    if cohort_dir is None:
        cohort_dir = os.path.commonpath([os.path.dirname(os.path.abspath(case_dir))
                                         for case_dir in case_dirs])
    try:
        run_cohort([report.out_dir for report in reports], config, cohort_dir, jobs)
    except (CoronaryError, ValueError, OSError) as error:
        logger.error('cohort metrics failed: {}'.format(error))
    return reports


def run_cohort(out_dirs, config=None, cohort_dir=None, jobs=1):
    """Pool the features.csv of several cases and report classifier metrics.

    One case holds a single patient, so its own metrics stage can not
    split it into train, validation and test sets. The pooled table keeps
    one patient per case and is split by patient like any dataset.

    :param out_dirs: per-case output directories; cases without
                     features.csv are skipped with a warning
    :param config: Munch from load_config()
    :param cohort_dir: where cohort_features.csv and cohort_metrics.json go
    :param jobs: workers for metrics_report()
    :return: the cohort_metrics.json document
    :raises MissingInputError: no case has a feature table

    """

    config = config if config is not None else load_config()
    frames = []
    for out_dir in out_dirs:
        path = os.path.join(out_dir, OUTPUT_FILES['features'])
        if not os.path.exists(path):
            logger.warning('{} has no feature table, left out of the cohort'.format(out_dir))
            continue
        frames.append(FeatureTable.from_csv(path).frame)
    if not frames:
        raise MissingInputError('no {} to pool'.format(OUTPUT_FILES['features']))

    table = FeatureTable(pd.concat(frames, ignore_index=True, sort=False))
    os.makedirs(cohort_dir, exist_ok=True)
    table.to_csv(os.path.join(cohort_dir, COHORT_FILES['features']), provenance_header(config))
    publish_coronary_metric('analysis.pipeline.run_cohort')

    document = provenance(config)
    document['cases'] = len(frames)
    if not table.has_functional or table.frame['vffr'].isna().all():
        logger.info('cohort has no functional values, metrics skipped')
        document['pairs'] = {}
    else:
        document['pairs'], _ = metrics_report(table, config, jobs=jobs)
    write_json(os.path.join(cohort_dir, COHORT_FILES['metrics']), document)
    logger.info('cohort of {} cases written to {}'.format(len(frames), cohort_dir))
    return document
