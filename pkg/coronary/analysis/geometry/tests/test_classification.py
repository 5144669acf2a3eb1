import json

import numpy as np
import pytest

from coronary.miscellaneous.errors import ClassificationError
from coronary.analysis.geometry.actions import Centerline, CoronaryTree, BranchName, Dominance, \
    Side, Classification, classify_rca, split_lca_candidates, classify_lad, classify_lcx, \
    classify_tree, apply_overrides, save_classification
from coronary.analysis.phantom.actions import PhantomSpec, TreeTemplate, gen_coronary_tree


def branch(start, direction, length, spacing=0.5):
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    steps = spacing * np.arange(1, int(round(length / spacing)) + 1)
    return np.asarray(start, dtype=float) + steps[:, None] * direction


def stem(length, spacing=0.5):
    return np.vstack([[0.0, 0.0, 0.0], branch((0, 0, 0), (1, 0, 0), length, spacing)])


def right_tree(first_radius, second_radius):
    """60 mm trunk of radius 2 forking into a 40 mm and a 30 mm branch."""
    trunk = stem(60.0)
    first = branch(trunk[-1], (1, 0.3, 0), 40.0)
    second = branch(trunk[-1], (1, -0.6, 0), 30.0)
    lines = [Centerline(np.vstack([trunk, first]),
                        np.concatenate([np.full(len(trunk), 2.0), np.full(len(first), first_radius)])),
             Centerline(np.vstack([trunk, second]),
                        np.concatenate([np.full(len(trunk), 2.0),
                                        np.full(len(second), second_radius)]))]
    return CoronaryTree('right', lines)


def left_tree(lad_mm=100.0, lcx_mm=60.0):
    """10 mm left main, an anterior and a posterior branch."""
    lm = stem(10.0)
    paths = [np.vstack([lm, branch(lm[-1], (1, -1, 0), lad_mm)]),
             np.vstack([lm, branch(lm[-1], (1, 1, 0), lcx_mm)])]
    return CoronaryTree('left', [Centerline(p, np.full(len(p), 1.5)) for p in paths])


def rotation_about_y(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def agrees(classification, truth):
    return all(index == truth.labels[name.value]
               for name, index in classification.labels.items())


class TestClassifyRca:

    def test_distinct_calibers_mean_left_dominance(self):
        tree = right_tree(1.5, 0.75)
        result = classify_rca(tree)
        assert result.dominance is Dominance.LEFT
        assert result.branch_labels == (BranchName.RCA, BranchName.AMB)
        assert result.rca_end_mm == tree.centerlines[0].length

    def test_identical_calibers_mean_right_dominance(self):
        result = classify_rca(right_tree(1.0, 1.0))
        assert result.dominance is Dominance.RIGHT
        assert result.labels[BranchName.RCA] == 0
        assert result.branch_labels[1] is BranchName.PDA_PLB
        assert 60.0 <= result.rca_end_mm <= 61.0

    @pytest.mark.parametrize('second_radius, dominance', [
        (0.95, Dominance.RIGHT),        # Rel.Diff 0.05
        (0.88, Dominance.RIGHT),        # 0.12
        (0.75, Dominance.CODOMINANT),   # 0.25
        (0.65, Dominance.CODOMINANT),   # 0.35
        (0.55, Dominance.LEFT),         # 0.45
    ])
    def test_dominance_bands(self, second_radius, dominance):
        result = classify_rca(right_tree(1.0, second_radius))
        assert result.dominance is dominance
        if dominance is not Dominance.LEFT:
            assert result.labels[BranchName.RCA] == 0
            assert result.branch_labels[1] is BranchName.PDA_PLB

    def test_codominant_band_from_config(self):
        tree, _ = gen_coronary_tree(PhantomSpec(2, template=TreeTemplate.CODOMINANT))
        assert classify_tree(tree).dominance is Dominance.CODOMINANT
        config = {'geometry': {'rca_codominant_rel_diff': 0.40}}
        assert classify_tree(tree, config).dominance is Dominance.RIGHT

    def test_single_centerline(self):
        tree = CoronaryTree('right', [Centerline(stem(50.0), np.ones(101))])
        result = classify_rca(tree)
        assert result.labels[BranchName.RCA] == 0
        assert result.dominance is Dominance.UNKNOWN

    def test_left_tree_rejected(self):
        with pytest.raises(ValueError):
            classify_rca(left_tree())

    @pytest.mark.parametrize('seed', range(50))
    @pytest.mark.parametrize('template', [TreeTemplate.RIGHT_DOMINANT, TreeTemplate.LEFT_DOMINANT,
                                          TreeTemplate.CODOMINANT])
    def test_phantom_trees(self, template, seed):
        tree, truth = gen_coronary_tree(PhantomSpec(seed, template=template))
        result = classify_tree(tree)
        assert result.dominance.value == truth.dominance
        assert agrees(result, truth)
        assert abs(result.rca_end_mm - truth.rca_end_mm) <= 1.0

    def test_scale_invariance(self):
        tree, _ = gen_coronary_tree(PhantomSpec(4, template=TreeTemplate.LEFT_DOMINANT))
        base = classify_tree(tree)
        scaled = classify_tree(tree.transformed(scale=2.0))
        assert scaled.branch_labels == base.branch_labels
        assert scaled.dominance is base.dominance


class TestClassifyLca:

    def test_candidates_by_orientation(self):
        split = split_lca_candidates(left_tree())
        assert split.lad == (0,)
        assert split.lcx == (1,)
        assert abs(split.bifurcation_mm - 10.0) <= 0.5

    def test_single_candidate_is_lad(self):
        tree = left_tree()
        assert classify_lad(tree, [0]).index == 0

    def test_short_candidates_rejected(self):
        selection = classify_lad(left_tree(lad_mm=50.0), [0])
        assert selection.index is None
        assert selection.flags == ('lad_no_candidate_over_80mm',)

    def test_smooth_main_vessel_beats_side_branch(self):
        spacing = 0.3
        lm = stem(10.0, spacing)
        main_dir = np.array([1.0, -1.0, 0.0]) / np.sqrt(2.0)
        main = np.vstack([lm, branch(lm[-1], main_dir, 100.0, spacing)])
        node = len(lm) - 1 + int(round(40.0 / spacing))
        angle = np.radians(-105.0)
        side = np.vstack([main[:node + 1],
                          branch(main[node], (np.cos(angle), np.sin(angle), 0.0), 60.0, spacing)])
        tree = CoronaryTree('left', [Centerline(side, np.ones(len(side))),
                                     Centerline(main, np.ones(len(main)))])
        selection = classify_lad(tree, [0, 1])
        assert selection.index == 1
        assert selection.scores[1][0] > selection.scores[0][0]

    def test_single_lcx_candidate(self):
        tree = left_tree()
        assert classify_lcx(tree, [1], np.array([10.0, 0.0, 0.0])).index == 1

    def test_posterior_candidate_wins_equal_volumes(self):
        lm = stem(10.0)
        paths = [np.vstack([lm, branch(lm[-1], (1, 0.3, 0), 40.0)]),
                 np.vstack([lm, branch(lm[-1], (1, 1, 0), 40.0)])]
        tree = CoronaryTree('left', [Centerline(p, np.ones(len(p))) for p in paths])
        assert tree.centerlines[0].volume() == pytest.approx(tree.centerlines[1].volume())
        assert classify_lcx(tree, [0, 1], lm[-1]).index == 1

    def test_no_lcx_candidate(self):
        assert classify_lcx(left_tree(), [], np.zeros(3)).flags == ('lcx_no_candidate',)

    @pytest.mark.parametrize('seed', range(50))
    def test_phantom_trees(self, seed):
        tree, truth = gen_coronary_tree(PhantomSpec(seed, template=TreeTemplate.LEFT))
        result = classify_tree(tree)
        assert result.succeeded
        assert agrees(result, truth)
        assert abs(result.bifurcation_mm - truth.bifurcation_mm) <= 0.5

    def test_phantom_candidate_partition(self):
        for seed in range(50):
            tree, truth = gen_coronary_tree(PhantomSpec(seed, template=TreeTemplate.LEFT))
            split = split_lca_candidates(tree)
            for index, name in enumerate(truth.names):
                anterior = name in ('LAD', 'D1', 'D2')
                assert (index in split.lad) == anterior, (seed, name)

    def test_ambiguous_trees_still_labelled(self):
        for seed in range(20):
            tree, truth = gen_coronary_tree(PhantomSpec(seed, template=TreeTemplate.LEFT_AMBIGUOUS))
            result = classify_tree(tree)
            assert truth.ambiguous
            assert result.labels[BranchName.LAD] == truth.labels['LAD'], seed
            assert result.labels[BranchName.LCX] is not None

    def test_rotation_about_the_anterior_posterior_axis(self):
        tree, _ = gen_coronary_tree(PhantomSpec(2, template=TreeTemplate.LEFT))
        base = classify_tree(tree)
        moved = classify_tree(tree.transformed(rotation_about_y(0.7), translation=(5.0, -3.0, 12.0)))
        assert moved.branch_labels == base.branch_labels

    def test_deterministic(self):
        tree, _ = gen_coronary_tree(PhantomSpec(9, template=TreeTemplate.LEFT))
        assert classify_tree(tree).as_dict() == classify_tree(tree).as_dict()


class TestOverrides:

    def test_relabel(self):
        result = classify_tree(left_tree())
        corrected = apply_overrides(result, {'labels': {'LAD': 1, 'LCx': 0}})
        assert corrected.labels == {BranchName.LAD: 1, BranchName.LCX: 0}
        assert corrected.flags[-1] == 'manual_override'

    def test_unset_label(self):
        corrected = apply_overrides(classify_tree(left_tree()), {'labels': {'LCx': None}})
        assert corrected.labels[BranchName.LCX] is None
        with pytest.raises(ClassificationError):
            corrected.index_of('LCx')

    def test_dominance_and_end(self):
        result = classify_rca(right_tree(1.0, 1.0))
        corrected = apply_overrides(result, {'dominance': 'left', 'rca_end_mm': 80.0})
        assert corrected.dominance is Dominance.LEFT
        assert corrected.rca_end_mm == 80.0

    def test_json_round_trip(self, tmp_path):
        result = classify_tree(left_tree())
        path = str(tmp_path / 'classification.json')
        save_classification(result, path, {'config_hash': 'abc'})
        with open(path) as fh:
            document = json.load(fh)
        assert document['config_hash'] == 'abc'
        assert document['labels'] == {'RCA': None, 'LAD': 0, 'LCx': 1}
        loaded = Classification.from_dict(document)
        assert loaded.side is Side.LEFT
        assert loaded.branch_labels == result.branch_labels
