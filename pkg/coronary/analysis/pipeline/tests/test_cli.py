import json

import pandas as pd
import pytest

from coronary.analysis.pipeline.actions.cli import main, build_parser


@pytest.fixture(scope='module')
def dataset(tmp_path_factory):
    path = str(tmp_path_factory.mktemp('cli') / 'lesions.csv')
    assert main(['dataset', '--out', path, '--rows', '120', '--patients', '40',
                 '--seed', '3']) == 0
    return path


@pytest.fixture
def quick_ini(tmp_path):
    path = tmp_path / 'quick.ini'
    path.write_text('[classifier]\nepochs = 5\nwidth = 8\n')
    return str(path)


class TestCli:

    def test_dataset_writes_truth(self, dataset):
        frame = pd.read_csv(dataset, comment='#')
        assert len(frame) == 120
        with open(dataset.replace('.csv', '.truth.json')) as fh:
            assert json.load(fh)['spec']['seed'] == 3

    def test_stats(self, dataset, tmp_path):
        out = str(tmp_path / 'stats.json')
        assert main(['stats', dataset, '--criterion', 'FFR', '--feature', 'fai',
                     '--out', out]) == 0
        with open(out) as fh:
            document = json.load(fh)
        assert document['feature'] == 'fai'
        assert document['criterion'] == 'FFR'
        assert 0.0 <= document['p'] <= 1.0

    def test_unknown_feature_exits_2(self, dataset):
        assert main(['stats', dataset, '--criterion', 'FFR', '--feature', 'volume']) == 2

    def test_train_then_predict(self, dataset, quick_ini, tmp_path):
        model = str(tmp_path / 'model.json')
        report = str(tmp_path / 'report.json')
        assert main(['train', dataset, '--criterion', 'FFR', '--model', model,
                     '--report', report, '--config', quick_ini]) == 0
        with open(report) as fh:
            assert json.load(fh)['criterion'] == 'FFR'

        scores = str(tmp_path / 'scores.csv')
        assert main(['predict', dataset, '--model', model, '--out', scores]) == 0
        frame = pd.read_csv(scores, comment='#')
        assert len(frame) == 120
        assert frame['probability'].between(0.0, 1.0).all()
        assert set(frame['severe']) <= {0, 1}

    def test_missing_config_file(self, dataset, tmp_path):
        assert main(['stats', dataset, '--criterion', 'FFR', '--feature', 'fai',
                     '--config', str(tmp_path / 'absent.ini')]) == 2

    def test_stage_commands(self):
        choices = build_parser()._subparsers._group_actions[0].choices
        assert {'classify', 'stenosis', 'pcat', 'run', 'phantom'} <= set(choices)

    def test_malformed_case_exits_2(self, tmp_path):
        case_dir = tmp_path / 'case_000'
        case_dir.mkdir()
        (case_dir / 'centerlines_right.json').write_text('{"side": "right", "ostium": [0, 0, 0]}')
        assert main(['run', str(case_dir), '--out', str(tmp_path / 'out')]) == 2
