"""Synthetic coronary trees with known branch labels and dominance."""

import collections
import logging

import numpy as np

from coronary.metrics.metrics import publish_coronary_metric
from coronary.analysis.geometry.actions import Centerline, CoronaryTree, Side, BranchName, \
    Dominance
from .constants import PhantomConstants, TreeTemplate
from .profile import narrowing
from .spec import ground_truth

logger = logging.getLogger(__name__)

_Branch = collections.namedtuple(
    '_Branch', ['name', 'label', 'points', 'radius', 'parent', 'start_index', 'terminal'])


def _unit(vector):
    vector = np.asarray(vector, dtype=float)
    return vector / np.linalg.norm(vector)


def rotate_toward(direction, target, angle_deg):
    """Rotate a unit direction by angle_deg in the plane it spans with target."""
    direction = _unit(direction)
    normal = np.asarray(target, dtype=float) - np.dot(target, direction) * direction
    normal = _unit(normal)
    angle = np.radians(angle_deg)
    return np.cos(angle) * direction + np.sin(angle) * normal


def grow_path(start, direction, length, spacing, target=None, turn_rate=0.0):
    """Points of a smooth path grown from start, start excluded.

    At every step the heading moves toward target by turn_rate per mm,
    which keeps the curvature small and continuous.

    :param start: first position, mm
    :param direction: initial heading
    :param length: path length, mm
    :param spacing: step, mm
    :param target: asymptotic heading, optional
    :param turn_rate: fraction of the heading error corrected per mm
    :return: (n, 3) array

    """

    heading = _unit(direction)
    goal = None if target is None else _unit(target)
    position = np.asarray(start, dtype=float)
    points = []
    for _ in range(int(round(length / spacing))):
        if goal is not None and turn_rate:
            heading = _unit(heading + min(turn_rate * spacing, 1.0) * (goal - heading))
        position = position + spacing * heading
        points.append(position)
    return np.array(points)


class _TreeBuilder:

    def __init__(self, ostium, spacing, rng, ripple, ripple_period, lesions):
        self.ostium = np.asarray(ostium, dtype=float)
        self.spacing = spacing
        self.rng = rng
        self.ripple = ripple
        self.ripple_period = ripple_period
        self.lesions = lesions or {}
        self.branches = collections.OrderedDict()

    def composite(self, name):
        branch = self.branches[name]
        if branch.parent is None:
            return branch.points, branch.radius
        points, radius = self.composite(branch.parent)
        cut = branch.start_index + 1
        return np.vstack([points[:cut], branch.points]), np.concatenate([radius[:cut], branch.radius])

    def add(self, name, label, length, r_start, r_end, direction, target=None, turn_rate=0.0,
            parent=None, at_mm=None, angle_deg=None, terminal=True):
        if parent is None:
            start_index, start = None, self.ostium
            prefix = 0
        else:
            parent_points, _ = self.composite(parent)
            start_index = len(parent_points) - 1 if at_mm is None else int(round(at_mm / self.spacing))
            start = parent_points[start_index]
            prefix = start_index
            if angle_deg is not None:
                tangent = parent_points[start_index] - parent_points[start_index - 1]
                direction = rotate_toward(tangent, direction, angle_deg)
        points = grow_path(start, direction, length, self.spacing, target, turn_rate)
        if parent is None:
            points = np.vstack([self.ostium, points])
        gamma = self.spacing * (prefix + np.arange(len(points)) + (0 if parent is None else 1))
        fraction = np.linspace(0.0, 1.0, len(points))
        radius = r_start + (r_end - r_start) * fraction
        if self.ripple:
            phase = self.rng.uniform(0.0, 2.0 * np.pi)
            radius = radius * (1.0 + self.ripple * np.sin(2.0 * np.pi * gamma / self.ripple_period
                                                          + phase))
        radius = radius * narrowing(self.lesions.get(name, ()), gamma)
        self.branches[name] = _Branch(name, label, points, radius, parent, start_index, terminal)

    def uniform(self, low, high):
        return float(self.rng.uniform(low, high))


def _left_template(builder, ambiguous=False):
    u = builder.uniform
    lm = u(8.0, 12.0)
    builder.add('LM', BranchName.UNCLASSIFIED, lm, 2.2, 2.1, (1.0, -0.2, -0.3), terminal=False)
    builder.add('LAD', BranchName.LAD, u(110.0, 130.0), 1.8, 1.0, (0.3, -1.0, -0.4),
                target=(0.1, -0.6, -1.0), turn_rate=0.01, parent='LM')
    if ambiguous:
        # LCx turning lateral while an obtuse marginal of similar size runs posterior
        builder.add('LCx', BranchName.LCX, u(70.0, 80.0), 1.5, 1.0, (0.8, 0.6, -0.3),
                    target=(1.0, 0.1, -0.6), turn_rate=0.03, parent='LM')
    else:
        builder.add('LCx', BranchName.LCX, u(70.0, 90.0), 1.6, 1.0, (0.6, 0.8, -0.3),
                    target=(0.2, 1.0, -0.6), turn_rate=0.015, parent='LM')
    builder.add('D1', BranchName.UNCLASSIFIED, u(45.0, 60.0), 1.1, 0.7, (1.0, -0.3, -0.3),
                target=(1.0, -0.4, -0.8), turn_rate=0.01, parent='LAD',
                at_mm=lm + u(25.0, 35.0), angle_deg=u(45.0, 55.0))
    builder.add('D2', BranchName.UNCLASSIFIED, u(30.0, 40.0), 0.9, 0.6, (1.0, -0.3, -0.3),
                target=(1.0, -0.4, -0.8), turn_rate=0.01, parent='LAD',
                at_mm=lm + u(55.0, 65.0), angle_deg=u(45.0, 55.0))
    builder.add('OM1', BranchName.UNCLASSIFIED, u(35.0, 50.0), 1.0, 0.7, (1.0, 0.3, -0.6),
                target=(1.0, 0.3, -0.8), turn_rate=0.01, parent='LCx',
                at_mm=lm + u(20.0, 30.0), angle_deg=u(45.0, 60.0))
    if ambiguous:
        builder.add('OM2', BranchName.UNCLASSIFIED, u(40.0, 50.0), 1.4, 1.0, (0.1, 1.0, -0.3),
                    target=(0.0, 1.0, -0.6), turn_rate=0.02, parent='LCx',
                    at_mm=lm + u(15.0, 20.0), angle_deg=u(40.0, 50.0))
    else:
        builder.add('OM2', BranchName.UNCLASSIFIED, u(25.0, 35.0), 0.8, 0.6, (1.0, 0.3, -0.6),
                    target=(1.0, 0.3, -0.8), turn_rate=0.01, parent='LCx',
                    at_mm=lm + u(45.0, 55.0), angle_deg=u(45.0, 60.0))


def _right_template(builder, template):
    u = builder.uniform
    if template is TreeTemplate.LEFT_DOMINANT:
        builder.add('RCA', BranchName.RCA, u(120.0, 140.0), 2.0, 1.5, (-1.0, -0.4, -0.2),
                    target=(0.0, 0.3, -1.0), turn_rate=0.02)
        builder.add('CONUS', BranchName.UNCLASSIFIED, u(20.0, 30.0), 0.7, 0.5, (-0.2, -1.0, 0.4),
                    parent='RCA', at_mm=u(8.0, 12.0), angle_deg=u(50.0, 60.0))
        builder.add('AMB', BranchName.AMB, u(50.0, 60.0), 0.75, 0.55, (0.3, -1.0, -0.6),
                    target=(0.5, -0.5, -1.0), turn_rate=0.01, parent='RCA',
                    at_mm=u(45.0, 55.0), angle_deg=u(50.0, 60.0))
        return

    trunk = u(85.0, 100.0)
    builder.add('TRUNK', BranchName.UNCLASSIFIED, trunk, 2.0, 1.6, (-1.0, -0.4, -0.2),
                target=(0.0, 0.3, -1.0), turn_rate=0.02, terminal=False)
    builder.add('CONUS', BranchName.UNCLASSIFIED, u(20.0, 30.0), 0.7, 0.5, (-0.2, -1.0, 0.4),
                parent='TRUNK', at_mm=u(8.0, 12.0), angle_deg=u(50.0, 60.0))
    builder.add('AM', BranchName.UNCLASSIFIED, u(25.0, 35.0), 0.7, 0.5, (0.3, -1.0, -0.6),
                parent='TRUNK', at_mm=u(45.0, 55.0), angle_deg=u(50.0, 60.0))
    # distal Rel.Diff of PDA against PLB: about 0.07 right dominant, 0.25 codominant
    pda_scale = 1.0 if template is TreeTemplate.RIGHT_DOMINANT else 0.7
    builder.add('PDA', BranchName.PDA_PLB, u(40.0, 50.0), 1.3 * pda_scale, 0.9 * pda_scale,
                (0.3, -0.3, -1.0), target=(0.5, -0.2, -1.0), turn_rate=0.01, parent='TRUNK',
                angle_deg=u(35.0, 45.0))
    builder.add('PLB', BranchName.PDA_PLB, u(30.0, 38.0), 1.2, 0.85, (1.0, 0.8, -0.2),
                target=(1.0, 0.5, -0.5), turn_rate=0.01, parent='TRUNK', angle_deg=u(35.0, 45.0))


def _bifurcation_truth(builder, centerlines, names):
    composites = [builder.composite(name)[0] for name in names]
    nodes = {}
    for branch in builder.branches.values():
        if branch.parent is None:
            continue
        parent_points, _ = builder.composite(branch.parent)
        k = branch.start_index
        members = tuple(i for i, points in enumerate(composites)
                        if len(points) > k + 1 and np.array_equal(points[:k + 1],
                                                                  parent_points[:k + 1]))
        if len(members) < 2:
            continue
        key = (k, tuple(parent_points[k]))
        merged = set(nodes.get(key, ground_truth(centerlines=())).centerlines) | set(members)
        nodes[key] = ground_truth(position=parent_points[k], abscissa=k * builder.spacing,
                                  centerlines=tuple(sorted(merged)))
    return sorted(nodes.values(), key=lambda node: (node.abscissa, node.centerlines))


def gen_coronary_tree(spec, ostium=(0.0, 0.0, 0.0), lesions=None, shuffle=True):
    """Coronary tree of the spec template with its ground truth.

    Left trees hold LM, LAD with two diagonals and LCx with two obtuse
    marginals; right trees hold the RCA with PDA/PLB (right dominant or
    codominant) or with an acute marginal (left dominant), plus small
    side branches. Centerline order is shuffled with the seed.

    :param spec: PhantomSpec (seed, template, ripple)
    :param ostium: ostium position, mm
    :param lesions: optional dict branch name -> LesionSpec list, centers
                    on the abscissa of that branch's centerline
    :param shuffle: shuffle centerline order
    :return: (CoronaryTree, GroundTruth)

    """

    publish_coronary_metric('analysis.phantom.gen_coronary_tree')
    rng = np.random.default_rng(spec.seed)
    template = spec.template
    builder = _TreeBuilder(ostium, PhantomConstants.TREE_SPACING_MM, rng, spec.ripple,
                           spec.ripple_period_mm, lesions)
    left = template in (TreeTemplate.LEFT, TreeTemplate.LEFT_AMBIGUOUS)
    if left:
        _left_template(builder, template is TreeTemplate.LEFT_AMBIGUOUS)
    else:
        _right_template(builder, template)

    names = [branch.name for branch in builder.branches.values() if branch.terminal]
    order = rng.permutation(len(names)) if shuffle else np.arange(len(names))
    names = [names[i] for i in order]
    centerlines = [Centerline(*builder.composite(name)) for name in names]
    tree = CoronaryTree(Side.LEFT if left else Side.RIGHT, centerlines, ostium)

    labels = [builder.branches[name].label for name in names]
    if left:
        dominance = Dominance.UNKNOWN
        rca_end = None
        bifurcation_mm = (len(builder.branches['LM'].points) - 1) * builder.spacing
    elif template is TreeTemplate.LEFT_DOMINANT:
        dominance = Dominance.LEFT
        rca_end = centerlines[names.index('RCA')].length
        bifurcation_mm = None
    else:
        dominance = Dominance.RIGHT if template is TreeTemplate.RIGHT_DOMINANT \
            else Dominance.CODOMINANT
        longest = max(('PDA', 'PLB'), key=lambda name: (centerlines[names.index(name)].length,
                                                          -names.index(name)))
        labels = [BranchName.RCA if name == longest else label
                  for name, label in zip(names, labels)]
        rca_end = (len(builder.branches['TRUNK'].points) - 1) * builder.spacing
        bifurcation_mm = None

    major = {label.value: (labels.index(label) if label in labels else None)
             for label in (BranchName.RCA, BranchName.LAD, BranchName.LCX)}
    truth = ground_truth(
        template=template.value, side=tree.side.value, names=names,
        branch_labels=[label.value for label in labels], labels=major,
        dominance=dominance.value,
        rca_end_mm=rca_end, bifurcation_mm=bifurcation_mm,
        bifurcations=_bifurcation_truth(builder, centerlines, names),
        ambiguous=template is TreeTemplate.LEFT_AMBIGUOUS)
    logger.debug('{} tree: {}'.format(template.value, dict(zip(names, truth.branch_labels))))
    return tree, truth
