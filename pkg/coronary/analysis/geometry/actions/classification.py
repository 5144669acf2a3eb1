"""Automatic classification of the RCA, LAD and LCx centerlines."""

import collections
import json
import logging

import numpy as np

from coronary.miscellaneous.convert import write_json
from coronary.miscellaneous.errors import ClassificationError, InsufficientSupportError
from coronary.metrics.metrics import publish_coronary_metric
from .centerline import find_bifurcations, pair_bifurcation, kernel_tangent, \
    orientation_vector, cosine_similarity
from .constants import Side, BranchName, Dominance, MAJOR_BRANCHES, ANTERIOR, \
    POSTERIOR, GeometryConstants

logger = logging.getLogger(__name__)

LcaSplit = collections.namedtuple(
    'LcaSplit', ['p_bif', 'bifurcation_mm', 'lad', 'lcx', 'orientations', 'flags'])

BranchSelection = collections.namedtuple('BranchSelection', ['index', 'scores', 'flags'])


class Classification:
    """Labels of one coronary tree.

    labels maps each major BranchName of the tree side to a centerline
    index (None when the branch could not be identified).
    """

    def __init__(self, side, branch_labels, dominance=Dominance.UNKNOWN,
                 rca_end_mm=None, bifurcation_mm=None, flags=()):
        self.side = Side(side)
        self.branch_labels = tuple(BranchName(label) for label in branch_labels)
        self.dominance = Dominance(dominance)
        self.rca_end_mm = rca_end_mm
        self.bifurcation_mm = bifurcation_mm
        self.flags = tuple(flags)

    @property
    def labels(self):
        result = {}
        for name in MAJOR_BRANCHES[self.side]:
            matches = [i for i, label in enumerate(self.branch_labels) if label is name]
            result[name] = matches[0] if matches else None
        return result

    @property
    def succeeded(self):
        return all(index is not None for index in self.labels.values())

    def index_of(self, name):
        """Centerline index of a major branch.

        :param name: BranchName or its value
        :return: int
        :raises ClassificationError: when the branch is not labelled

        """

        name = BranchName(name)
        index = self.labels.get(name)
        if index is None:
            raise ClassificationError('{} was not identified ({})'.format(
                name.value, ', '.join(self.flags) or 'no flags'))
        return index

    def as_dict(self):
        labels = {name.value: None for name in (BranchName.RCA, BranchName.LAD, BranchName.LCX)}
        labels.update({name.value: index for name, index in self.labels.items()})
        return {
            'side': self.side.value,
            'labels': labels,
            'dominance': self.dominance.value,
            'branch_labels': [label.value for label in self.branch_labels],
            'rca_end_mm': self.rca_end_mm,
            'bifurcation_mm': self.bifurcation_mm,
            'flags': list(self.flags),
        }

    @classmethod
    def from_dict(cls, document):
        return cls(document['side'], document['branch_labels'], document['dominance'],
                   document.get('rca_end_mm'), document.get('bifurcation_mm'),
                   document.get('flags', ()))


def _mean_distal_diameter(centerline, index):
    distal = centerline.radius[index + 1:]
    if not len(distal):
        distal = centerline.radius[-1:]
    return float(np.mean(2.0 * distal))


def classify_rca(tree, rel_diff=GeometryConstants.RCA_REL_DIFF,
                 tol=GeometryConstants.BIFURCATION_TOL_MM,
                 codominant_rel_diff=GeometryConstants.RCA_CODOMINANT_REL_DIFF):
    """Identify the RCA and the coronary dominance of a right tree.

    The two longest centerlines are compared by the mean diameter distal
    to their mutual bifurcation. A relative difference above rel_diff
    marks the smaller one as the acute marginal branch (left dominance)
    and the larger one as the full-length RCA; otherwise the RCA ends at
    the PDA/PLB bifurcation. Between codominant_rel_diff and rel_diff the
    right PDA is markedly thinner than its sibling and the tree is called
    codominant; up to codominant_rel_diff it is right dominant.

    :param tree: right CoronaryTree
    :param rel_diff: relative distal-caliber threshold
    :param tol: bifurcation tolerance, mm
    :param codominant_rel_diff: lower bound of the codominant band
    :return: Classification

    """

    publish_coronary_metric('analysis.geometry.classify_rca')
    if tree.side is not Side.RIGHT:
        raise ValueError('classify_rca expects a right tree, got {}'.format(tree.side.value))
    count = len(tree.centerlines)
    if not count:
        raise ClassificationError('empty right coronary tree')

    labels = [BranchName.UNCLASSIFIED] * count
    if count == 1:
        labels[0] = BranchName.RCA
        return Classification(Side.RIGHT, labels, Dominance.UNKNOWN,
                              rca_end_mm=tree.centerlines[0].length)

    order = sorted(range(count), key=lambda i: (-tree.centerlines[i].length, i))
    first, second = order[0], order[1]
    flags = []
    found = pair_bifurcation(tree.centerlines[first], tree.centerlines[second], tol)
    if found is None:
        flags.append('no_mutual_bifurcation')
        logger.warning('two longest right centerlines {} and {} share no prefix'.format(first, second))
        found = (0, 0)

    d_first = _mean_distal_diameter(tree.centerlines[first], found[0])
    d_second = _mean_distal_diameter(tree.centerlines[second], found[1])
    larger, smaller = (first, second) if d_first >= d_second else (second, first)
    relative = abs(d_first - d_second) / max(d_first, d_second)
    logger.debug('right tree: distal diameters {:.3f}/{:.3f} mm, Rel.Diff {:.3f}'.format(
        d_first, d_second, relative))

    if relative > rel_diff:
        labels[larger] = BranchName.RCA
        labels[smaller] = BranchName.AMB
        return Classification(Side.RIGHT, labels, Dominance.LEFT,
                              rca_end_mm=tree.centerlines[larger].length, flags=flags)

    labels[first] = BranchName.RCA
    labels[second] = BranchName.PDA_PLB
    rca_end = float(tree.centerlines[first].abscissa[found[0]])
    dominance = Dominance.CODOMINANT if relative > codominant_rel_diff else Dominance.RIGHT
    return Classification(Side.RIGHT, labels, dominance, rca_end_mm=rca_end, flags=flags)


def split_lca_candidates(tree, tol=GeometryConstants.BIFURCATION_TOL_MM):
    """Cluster left centerlines into LAD and LCx candidates.

    The orientation of a centerline is the vector from the first
    (most proximal) bifurcation to the centroid of its points distal to
    it, so the left main does not contribute. Anterior alignment makes a
    LAD candidate, posterior alignment a LCx candidate.

    :param tree: left CoronaryTree
    :param tol: bifurcation tolerance, mm
    :return: LcaSplit

    """

    publish_coronary_metric('analysis.geometry.split_lca_candidates')
    if tree.side is not Side.LEFT:
        raise ValueError('split_lca_candidates expects a left tree, got {}'.format(tree.side.value))
    if not len(tree.centerlines):
        raise ClassificationError('empty left coronary tree')

    flags = []
    nodes = find_bifurcations(tree, tol)
    if nodes:
        p_bif, bifurcation_mm = nodes[0].position, nodes[0].abscissa
    else:
        flags.append('no_bifurcation')
        p_bif, bifurcation_mm = tree.ostium, 0.0

    lad, lcx, orientations = [], [], {}
    for index, centerline in enumerate(tree.centerlines):
        v_o = orientation_vector(centerline, p_bif)
        orientations[index] = v_o
        if np.linalg.norm(v_o) == 0:
            flags.append('zero_orientation_{}'.format(index))
            lcx.append(index)
            continue
        if cosine_similarity(v_o, ANTERIOR) > cosine_similarity(v_o, POSTERIOR):
            lad.append(index)
        else:
            lcx.append(index)
    logger.debug('LAD candidates {}, LCx candidates {}'.format(lad, lcx))
    return LcaSplit(p_bif=np.asarray(p_bif), bifurcation_mm=float(bifurcation_mm),
                    lad=tuple(lad), lcx=tuple(lcx), orientations=orientations,
                    flags=tuple(flags))


def classify_lad(tree, candidates, min_length=GeometryConstants.LAD_MIN_LENGTH_MM,
                 half_kernel=GeometryConstants.TANGENT_HALF_KERNEL_MM,
                 tol=GeometryConstants.BIFURCATION_TOL_MM):
    """Select the LAD among its candidates.

    Candidates shorter than min_length are dropped. Walking the
    bifurcations among the remaining candidates from proximal to distal,
    only the centerlines with the highest cosine similarity between
    upstream and downstream kernel tangents survive each node.

    :param tree: left CoronaryTree
    :param candidates: LAD candidate indices
    :param min_length: total length filter, mm
    :param half_kernel: half width of the tangent kernel, mm
    :param tol: bifurcation tolerance, mm
    :return: BranchSelection (index None on failure)

    """

    publish_coronary_metric('analysis.geometry.classify_lad')
    flags = []
    survivors = [i for i in candidates if tree.centerlines[i].length >= min_length]
    if not survivors:
        flags.append('lad_no_candidate_over_{:g}mm'.format(min_length))
        logger.warning('no LAD candidate reaches {} mm'.format(min_length))
        return BranchSelection(None, {}, tuple(flags))

    scores = {}
    for node in find_bifurcations(tree, tol, members=survivors):
        present = [(i, k) for i, k in zip(node.centerlines, node.indices) if i in survivors]
        if len(present) < 2:
            continue
        node_scores = {}
        for index, point in present:
            try:
                t_up, t_down = kernel_tangent(tree.centerlines[index], point, half_kernel)
                node_scores[index] = cosine_similarity(t_up, t_down)
            except InsufficientSupportError as error:
                flags.append('lad_kernel_support_{}'.format(index))
                logger.warning('centerline {}: {}'.format(index, error))
                node_scores[index] = -np.inf
        best = max(node_scores.values())
        for index, value in node_scores.items():
            scores.setdefault(index, []).append(value)
            if value < best - GeometryConstants.SC_TIE_TOL:
                survivors.remove(index)
        logger.debug('node at {:.1f} mm: S_C {}'.format(node.abscissa, node_scores))

    if len(survivors) > 1:
        flags.append('lad_unresolved')
        survivors.sort(key=lambda i: (-tree.centerlines[i].length, i))
    return BranchSelection(survivors[0], scores, tuple(flags))


def classify_lcx(tree, candidates, p_bif):
    """Select the LCx among its candidates.

    Of the two largest-volume candidates the one whose orientation is
    most aligned with the posterior direction is the LCx.

    :param tree: left CoronaryTree
    :param candidates: LCx candidate indices
    :param p_bif: position of the left main bifurcation
    :return: BranchSelection (index None on failure)

    """

    publish_coronary_metric('analysis.geometry.classify_lcx')
    if not candidates:
        logger.warning('no LCx candidate')
        return BranchSelection(None, {}, ('lcx_no_candidate',))
    volumes = {i: tree.centerlines[i].volume() for i in candidates}
    largest = sorted(candidates, key=lambda i: (-volumes[i], i))[:2]
    scores = {i: cosine_similarity(orientation_vector(tree.centerlines[i], p_bif), POSTERIOR)
              for i in largest}
    best = sorted(largest, key=lambda i: (-scores[i], i))[0]
    return BranchSelection(best, scores, ())


def classify_lca(tree, min_length=GeometryConstants.LAD_MIN_LENGTH_MM,
                 half_kernel=GeometryConstants.TANGENT_HALF_KERNEL_MM,
                 tol=GeometryConstants.BIFURCATION_TOL_MM):
    """Identify LAD and LCx of a left tree.

    :return: Classification

    """

    split = split_lca_candidates(tree, tol)
    lad = classify_lad(tree, split.lad, min_length, half_kernel, tol)
    lcx = classify_lcx(tree, split.lcx, split.p_bif)
    labels = [BranchName.UNCLASSIFIED] * len(tree.centerlines)
    if lad.index is not None:
        labels[lad.index] = BranchName.LAD
    if lcx.index is not None:
        labels[lcx.index] = BranchName.LCX
    return Classification(Side.LEFT, labels, Dominance.UNKNOWN,
                          bifurcation_mm=split.bifurcation_mm,
                          flags=split.flags + lad.flags + lcx.flags)


def classify_tree(tree, config=None):
    """Classify the major branches of a tree of either side.

    :param tree: CoronaryTree
    :param config: optional Munch with a 'geometry' section
    :return: Classification

    """

    settings = (config or {}).get('geometry', {})
    tol = settings.get('bifurcation_tol_mm', GeometryConstants.BIFURCATION_TOL_MM)
    if tree.side is Side.RIGHT:
        result = classify_rca(
            tree, settings.get('rca_rel_diff', GeometryConstants.RCA_REL_DIFF), tol,
            settings.get('rca_codominant_rel_diff', GeometryConstants.RCA_CODOMINANT_REL_DIFF))
    else:
        result = classify_lca(
            tree,
            settings.get('lad_min_length_mm', GeometryConstants.LAD_MIN_LENGTH_MM),
            settings.get('tangent_half_kernel_mm', GeometryConstants.TANGENT_HALF_KERNEL_MM),
            tol)
    if not result.succeeded:
        logger.warning('{} tree classification incomplete: {}'.format(
            tree.side.value, ', '.join(result.flags)))
    return result


def apply_overrides(classification, overrides):
    """Manual correction of an automatic classification.

    :param classification: Classification
    :param overrides: dict with optional "labels" ({"LAD": idx, ...}),
                      "dominance" and "rca_end_mm"
    :return: new Classification flagged 'manual_override'

    """

    labels = list(classification.branch_labels)
    for name, index in overrides.get('labels', {}).items():
        name = BranchName(name)
        labels = [BranchName.UNCLASSIFIED if label is name else label for label in labels]
        if index is not None:
            labels[int(index)] = name
    logger.info('manual override applied to {} tree'.format(classification.side.value))
    return Classification(
        classification.side, labels,
        overrides.get('dominance', classification.dominance),
        overrides.get('rca_end_mm', classification.rca_end_mm),
        overrides.get('bifurcation_mm', classification.bifurcation_mm),
        classification.flags + ('manual_override',))


def load_overrides(path):
    """Read an override file: {"left": {...}, "right": {...}} or a single entry."""
    with open(path) as fh:
        return json.load(fh)


def save_classification(classification, path, provenance=None):
    document = classification.as_dict()
    if provenance:
        document.update(provenance)
    write_json(path, document)
