"""coronary-pcat command line: one subcommand per stage plus run."""

import argparse
import logging
import os
import sys

from coronary.version import __version__
from coronary.miscellaneous.convert import canonical_json, write_json
from coronary.miscellaneous.errors import CoronaryError
from coronary.miscellaneous.settings import load_config
from coronary.analysis.geometry.actions import load_overrides
from coronary.analysis.classifier.actions import Criterion, BranchSubset, FeatureTable, MlpModel, \
    ID_COLUMNS, train_criterion, result_summary, metrics_report, predict_frame, ClassifierConstants
from coronary.analysis.stats.actions import compare_groups, stratify_by_criterion, \
    comparison_summary
from coronary.analysis.phantom.actions import TreeTemplate, LabelRule, DatasetSpec, \
    gen_feature_dataset, write_case
from .constants import Stage, LOG_FORMAT
from .factory import Factory
from .runner import run_cases
from .stages import provenance, provenance_header

logger = logging.getLogger(__name__)


def _setup_logging(verbose):
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root = logging.getLogger()
    root.handlers = [handler]
    root.setLevel(logging.DEBUG if verbose else logging.INFO)


def _emit(document, out):
    if out:
        write_json(out, document)
    else:
        sys.stdout.write(canonical_json(document))


def _overrides(args):
    return load_overrides(args.override_labels) if args.override_labels else None


def _stage(stage):
    def command(args, config):
        out_dir = args.out or args.case_dir
        os.makedirs(out_dir, exist_ok=True)
        result = Factory.factory_by_stage(stage, args=(args.case_dir, out_dir, config),
                                          kwargs={'overrides': _overrides(args),
                                                  'jobs': config.pipeline.jobs})
        for flag in result.flags:
            logger.warning('{}: {}'.format(stage.value, flag))
        for error in result.errors:
            logger.error('{}: {}'.format(stage.value, error))
        return 1 if result.errors else 0
    return command


def cmd_phantom(args, config):
    template = TreeTemplate(args.template)
    for number in range(args.cases):
        directory = os.path.join(args.out, 'case_{:03d}'.format(number))
        write_case(directory, config.pipeline.seed + 2 * number, template, args.spacing,
                   config.pipeline.jobs)
    return 0


def cmd_dataset(args, config):
    spec = DatasetSpec(config.pipeline.seed, args.rows, args.patients, args.rule,
                       args.signal_features, noise=args.noise)
    table, truth = gen_feature_dataset(spec)
    table.to_csv(args.out, provenance_header(config))
    write_json(os.path.splitext(args.out)[0] + '.truth.json', truth)
    logger.info('{} lesions written to {}'.format(len(table), args.out))
    return 0


def cmd_train(args, config):
    table = FeatureTable.from_csv(args.features)
    if args.criterion == 'all':
        subsets = tuple(BranchSubset) if args.subset == 'all' else (args.subset,)
        report, _ = metrics_report(table, config, jobs=config.pipeline.jobs, subsets=subsets)
        document = provenance(config)
        document['pairs'] = report
        _emit(document, args.report)
        return 0
    subset = BranchSubset.ALL if args.subset == 'all' else args.subset
    result = train_criterion(table, args.criterion, subset, config)
    if args.model:
        result.model.save(args.model)
        logger.info('model written to {}'.format(args.model))
    document = provenance(config)
    document.update(result_summary(result))
    _emit(document, args.report)
    return 0


def cmd_predict(args, config):
    model = MlpModel.load(args.model)
    table = FeatureTable.from_csv(args.features)
    frame = table.frame[ID_COLUMNS].copy()
    frame['probability'] = predict_frame(model, table.frame)
    frame['severe'] = (frame['probability'] >= ClassifierConstants.THRESHOLD).astype(int)
    with open(args.out, 'w') as fh:
        fh.write('# {}\n'.format(provenance_header(config)))
        frame.to_csv(fh, index=False, float_format='%.17g', lineterminator='\n')
    return 0


def cmd_stats(args, config):
    table = FeatureTable.from_csv(args.features)
    severe, other = stratify_by_criterion(table, args.criterion, args.feature)
    comparison = compare_groups(severe, other, args.feature)
    document = provenance(config)
    document.update(comparison_summary(comparison))
    document['criterion'] = Criterion(args.criterion).value
    _emit(document, args.out)
    return 0


def cmd_run(args, config):
    reports = run_cases(args.case_dirs, config, args.out, _overrides(args), config.pipeline.jobs)
    return max(report.exit_code for report in reports)


COMMAND_MAP = {
    'phantom': cmd_phantom,
    'classify': _stage(Stage.CLASSIFY),
    'stenosis': _stage(Stage.STENOSIS),
    'pcat': _stage(Stage.PCAT),
    'dataset': cmd_dataset,
    'train': cmd_train,
    'predict': cmd_predict,
    'stats': cmd_stats,
    'run': cmd_run,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='INI file overriding the packaged config.ini')
    common.add_argument('--seed', type=int, help='overrides [pipeline] seed')
    common.add_argument('--jobs', type=int, help='overrides [pipeline] jobs')
    common.add_argument('--override-labels', help='JSON manual classification corrections')
    common.add_argument('-v', '--verbose', action='store_true', help='debug logging')

    parser = argparse.ArgumentParser(
        prog='coronary-pcat',
        description='Coronary branch classification, stenosis detection and PCAT analysis.')
    parser.add_argument('--version', action='version', version=__version__)
    commands = parser.add_subparsers(dest='command', required=True)

    phantom = commands.add_parser('phantom', parents=[common], help='write synthetic cases')
    phantom.add_argument('--out', required=True, help='directory receiving case_NNN/')
    phantom.add_argument('--cases', type=int, default=1)
    phantom.add_argument('--template', default=TreeTemplate.RIGHT_DOMINANT.value,
                         choices=[TreeTemplate.RIGHT_DOMINANT.value,
                                  TreeTemplate.LEFT_DOMINANT.value,
                                  TreeTemplate.CODOMINANT.value])
    phantom.add_argument('--spacing', type=float, default=0.5, help='voxel spacing, mm')

    for stage, text in ((Stage.CLASSIFY, 'label RCA, LAD and LCx'),
                        (Stage.STENOSIS, 'detect lesions of the labelled vessels'),
                        (Stage.PCAT, 'measure per-vessel and per-lesion PCAT')):
        command = commands.add_parser(stage.value, parents=[common], help=text)
        command.add_argument('case_dir')
        command.add_argument('--out', help='output directory; the case directory by default')

    dataset = commands.add_parser('dataset', parents=[common],
                                  help='write a synthetic feature table')
    dataset.add_argument('--out', required=True, help='feature CSV')
    dataset.add_argument('--rows', type=int, default=200)
    dataset.add_argument('--patients', type=int, default=60)
    dataset.add_argument('--rule', default=LabelRule.LINEAR.value,
                         choices=[rule.value for rule in LabelRule])
    dataset.add_argument('--signal-features', nargs='+', default=['max_sd', 'fai'])
    dataset.add_argument('--noise', type=float, default=0.0)

    train = commands.add_parser('train', parents=[common], help='train and evaluate the MLP')
    train.add_argument('features', help='feature CSV with functional columns')
    train.add_argument('--criterion', default='all',
                       choices=[criterion.value for criterion in Criterion] + ['all'])
    train.add_argument('--subset', default='all',
                       choices=[subset.value for subset in BranchSubset if subset is not
                                BranchSubset.ALL] + ['all'])
    train.add_argument('--model', help='model JSON (single criterion only)')
    train.add_argument('--report', help='metrics JSON; stdout by default')

    predict = commands.add_parser('predict', parents=[common], help='score lesions')
    predict.add_argument('features')
    predict.add_argument('--model', required=True)
    predict.add_argument('--out', required=True, help='prediction CSV')

    stats = commands.add_parser('stats', parents=[common],
                                help='compare a feature between severe and non-severe lesions')
    stats.add_argument('features')
    stats.add_argument('--criterion', required=True, choices=[c.value for c in Criterion])
    stats.add_argument('--feature', required=True)
    stats.add_argument('--out', help='JSON output; stdout by default')

    run = commands.add_parser('run', parents=[common], help='run every stage on case directories')
    run.add_argument('case_dirs', nargs='+')
    run.add_argument('--out', help='outputs go to OUT/<case>; into each case directory by default')
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    _setup_logging(args.verbose)
    try:
        config = load_config(args.config, args.seed, args.jobs)
        return COMMAND_MAP[args.command](args, config)
    except (CoronaryError, FileNotFoundError, ValueError) as error:
        logger.error('{}: {}'.format(args.command, error))
        return 2


if __name__ == '__main__':
    sys.exit(main())
