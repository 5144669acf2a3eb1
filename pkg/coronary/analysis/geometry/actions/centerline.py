"""Centerlines, coronary trees and their local geometry."""

import collections
import json
import logging

import numpy as np
from scipy.spatial import cKDTree

from coronary.miscellaneous.errors import DegenerateGeometryError, CenterlineFormatError, \
    InsufficientSupportError
from coronary.miscellaneous.convert import write_json
from coronary.metrics.metrics import publish_coronary_metric
from .constants import Side, GeometryConstants

logger = logging.getLogger(__name__)

Bifurcation = collections.namedtuple(
    'Bifurcation', ['position', 'abscissa', 'centerlines', 'indices'])

BifurcationGeometry = collections.namedtuple(
    'BifurcationGeometry', ['v_o', 's_c', 't_up', 't_down'])


def _frozen(array):
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


def arc_length_parameterize(points):
    """Curvilinear abscissa of an ordered polyline.

    :param points: (n, 3) array-like of positions in mm
    :return: (n,) array, 0 at the first point, increments equal to the
             segment lengths

    """

    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 3:
        raise DegenerateGeometryError(
            'points must be an (n, 3) array, got shape {}'.format(points.shape))
    if len(points) < 2:
        raise DegenerateGeometryError(
            'a centerline needs at least 2 points, got {}'.format(len(points)))
    steps = np.linalg.norm(np.diff(points, axis=0), axis=1)
    duplicates = np.flatnonzero(steps <= GeometryConstants.MIN_SEGMENT_MM)
    if len(duplicates):
        raise DegenerateGeometryError(
            'duplicate consecutive points at index {}'.format(int(duplicates[0])))
    return np.concatenate(([0.0], np.cumsum(steps)))


def _point_tangents(points):
    directions = np.diff(points, axis=0)
    directions /= np.linalg.norm(directions, axis=1)[:, None]
    tangents = np.empty_like(points)
    tangents[0] = directions[0]
    tangents[-1] = directions[-1]
    mean = directions[:-1] + directions[1:]
    norms = np.linalg.norm(mean, axis=1)
    # a full reversal leaves no mean direction; fall back to the outgoing one
    reversed_ = norms < 1e-12
    mean[reversed_] = directions[1:][reversed_]
    norms[reversed_] = 1.0
    tangents[1:-1] = mean / norms[:, None]
    return tangents


class Centerline:
    """A vessel centerline parameterized by its curvilinear abscissa."""

    def __init__(self, points, radius):
        """Constructor of a centerline.

        :param points: (n, 3) positions, LPS mm
        :param radius: (n,) maximal inscribed sphere radius, mm
        :return: None

        """

        points = np.asarray(points, dtype=float)
        abscissa = arc_length_parameterize(points)
        radius = np.asarray(radius, dtype=float)
        if radius.shape != (len(points),):
            raise DegenerateGeometryError(
                'expected {} radii, got shape {}'.format(len(points), radius.shape))
        if not np.all(np.isfinite(radius)) or np.any(radius <= 0):
            raise DegenerateGeometryError('all radii must be finite and > 0')

        self.points = _frozen(points)
        self.radius = _frozen(radius)
        self.abscissa = _frozen(abscissa)
        self.tangents = _frozen(_point_tangents(points))
        self._kdtree = None

    def __len__(self):
        return len(self.points)

    @property
    def length(self):
        return float(self.abscissa[-1])

    @property
    def kdtree(self):
        if self._kdtree is None:
            self._kdtree = cKDTree(self.points)
        return self._kdtree

    def index_near(self, position):
        """Index of the point closest to a position."""
        return int(self.kdtree.query(np.asarray(position, dtype=float))[1])

    def point_at(self, abscissa):
        """Position at an abscissa, linearly interpolated."""
        return np.array([np.interp(abscissa, self.abscissa, self.points[:, axis])
                         for axis in range(3)])

    def radius_at(self, abscissa):
        return np.interp(abscissa, self.abscissa, self.radius)

    def section(self, start, end):
        """Points and radii covering [start, end], end points interpolated.

        :param start: abscissa in mm
        :param end: abscissa in mm, > start
        :return: (points, radius, abscissa)

        """

        start = max(float(start), 0.0)
        end = min(float(end), self.length)
        if end <= start:
            raise DegenerateGeometryError(
                'empty section [{}, {}] on a {:.1f} mm centerline'.format(start, end, self.length))
        inside = (self.abscissa > start) & (self.abscissa < end)
        abscissa = np.concatenate(([start], self.abscissa[inside], [end]))
        points = np.column_stack([np.interp(abscissa, self.abscissa, self.points[:, axis])
                                  for axis in range(3)])
        radius = np.interp(abscissa, self.abscissa, self.radius)
        return points, radius, abscissa

    def volume(self):
        """Tube approximation of the lumen volume, sum of pi r_i^2 dgamma_i.

        dgamma_i is the length of the segment ending at point i.

        """

        return float(np.sum(np.pi * self.radius[1:] ** 2 * np.diff(self.abscissa)))

    def transformed(self, rotation=None, translation=None, scale=1.0):
        """Copy under x -> scale * R x + t (radii scaled too)."""
        points = self.points * scale
        if rotation is not None:
            points = points @ np.asarray(rotation, dtype=float).T
        if translation is not None:
            points = points + np.asarray(translation, dtype=float)
        return Centerline(points, self.radius * scale)


class CoronaryTree:
    """All centerlines leaving one coronary ostium."""

    def __init__(self, side, centerlines, ostium=None,
                 ostium_tol=GeometryConstants.OSTIUM_TOL_MM):
        """Constructor of a coronary tree.

        :param side: Side or 'left'/'right'
        :param centerlines: list of Centerline
        :param ostium: 3D position; defaults to the first point of the
                       first centerline
        :param ostium_tol: maximum distance between a centerline start and
                           the ostium, mm
        :return: None

        """

        self.side = Side(side)
        self.centerlines = tuple(centerlines)
        if ostium is None:
            if not self.centerlines:
                raise DegenerateGeometryError('an empty tree needs an explicit ostium')
            ostium = self.centerlines[0].points[0]
        self.ostium = _frozen(ostium)
        for index, centerline in enumerate(self.centerlines):
            gap = np.linalg.norm(centerline.points[0] - self.ostium)
            if gap >= ostium_tol:
                raise DegenerateGeometryError(
                    'centerline {} starts {:.3f} mm from the ostium'.format(index, gap))
        self._bifurcations = {}

    def __len__(self):
        return len(self.centerlines)

    def bifurcations(self, tol=GeometryConstants.BIFURCATION_TOL_MM):
        if tol not in self._bifurcations:
            self._bifurcations[tol] = find_bifurcations(self, tol)
        return self._bifurcations[tol]

    def transformed(self, rotation=None, translation=None, scale=1.0):
        ostium = self.ostium * scale
        if rotation is not None:
            ostium = np.asarray(rotation, dtype=float) @ ostium
        if translation is not None:
            ostium = ostium + np.asarray(translation, dtype=float)
        return CoronaryTree(
            self.side,
            [c.transformed(rotation, translation, scale) for c in self.centerlines],
            ostium)


def kernel_tangent(centerline, index, half_kernel=GeometryConstants.TANGENT_HALF_KERNEL_MM):
    """Kernel-averaged unit tangents upstream and downstream of a point.

    Each segment direction is weighted by the length of its overlap with
    [gamma_i - half_kernel, gamma_i] (upstream) or
    [gamma_i, gamma_i + half_kernel] (downstream).

    :param centerline: Centerline
    :param index: interior point index
    :param half_kernel: half of the kernel width, mm
    :return: (t_up, t_down) unit vectors

    """

    gamma = centerline.abscissa
    if index <= 0 or index >= len(gamma) - 1:
        raise InsufficientSupportError(
            'point {} is not interior to a {}-point centerline'.format(index, len(gamma)))
    directions = np.diff(centerline.points, axis=0)
    directions /= np.linalg.norm(directions, axis=1)[:, None]
    starts, ends = gamma[:-1], gamma[1:]

    def average(low, high):
        overlap = np.clip(np.minimum(ends, high) - np.maximum(starts, low), 0.0, None)
        mean = overlap @ directions
        norm = np.linalg.norm(mean)
        if not np.any(overlap > 0) or norm < 1e-12:
            raise InsufficientSupportError(
                'no support in [{:.2f}, {:.2f}] mm'.format(low, high))
        return mean / norm

    center = gamma[index]
    return average(center - half_kernel, center), average(center, center + half_kernel)


def cosine_similarity(u, v):
    return float(np.clip(np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v)), -1.0, 1.0))


def orientation_vector(centerline, p_bif):
    """Vector from a bifurcation to the centroid of the distal points."""
    p_bif = np.asarray(p_bif, dtype=float)
    k = centerline.index_near(p_bif)
    distal = centerline.points[k + 1:]
    if not len(distal):
        distal = centerline.points[-1:]
    return distal.mean(axis=0) - p_bif


def bifurcation_geometry(centerline, index, p_bif=None,
                         half_kernel=GeometryConstants.TANGENT_HALF_KERNEL_MM):
    """Orientation and smoothness descriptors at a bifurcation node.

    :param centerline: Centerline
    :param index: node index on the centerline
    :param p_bif: bifurcation position; defaults to the node point
    :param half_kernel: half kernel for the tangents, mm
    :return: BifurcationGeometry

    """

    if p_bif is None:
        p_bif = centerline.points[index]
    t_up, t_down = kernel_tangent(centerline, index, half_kernel)
    return BifurcationGeometry(v_o=orientation_vector(centerline, p_bif),
                               s_c=cosine_similarity(t_up, t_down),
                               t_up=t_up, t_down=t_down)


def pair_bifurcation(first, second, tol=GeometryConstants.BIFURCATION_TOL_MM):
    """Last point of the shared prefix of two centerlines.

    :param first: Centerline walked from its start
    :param second: Centerline
    :param tol: maximum inter-centerline distance, mm
    :return: (index on first, index on second) or None when the
             centerlines never overlap or one is contained in the other

    """

    distances, _ = second.kdtree.query(first.points)
    if distances[0] > tol:
        return None
    apart = np.flatnonzero(distances > tol)
    if not len(apart):
        return None
    index = int(apart[0]) - 1
    return index, second.index_near(first.points[index])


def _bifurcation_nodes(centerlines, members, tol):
    pairs = []
    for a_pos, a in enumerate(members):
        for b in members[a_pos + 1:]:
            found = pair_bifurcation(centerlines[a], centerlines[b], tol)
            if found is None:
                logger.debug('centerlines {} and {} never overlap'.format(a, b))
                continue
            index = found[0]
            pairs.append((centerlines[a].abscissa[index], a, b, centerlines[a].points[index]))

    nodes = []
    for abscissa, a, b, position in sorted(pairs, key=lambda pair: (pair[0], pair[1], pair[2])):
        for node in nodes:
            # each pair estimate lies within tol of the branching point
            if np.linalg.norm(node['position'] - position) <= 2.0 * tol:
                node['centerlines'].update((a, b))
                break
        else:
            nodes.append({'position': position, 'abscissa': float(abscissa),
                          'centerlines': {a, b}})

    result = []
    for node in nodes:
        members_ = tuple(sorted(node['centerlines']))
        indices = tuple(centerlines[i].index_near(node['position']) for i in members_)
        result.append(Bifurcation(position=node['position'], abscissa=node['abscissa'],
                                  centerlines=members_, indices=indices))
    return sorted(result, key=lambda node: (node.abscissa, node.centerlines))


def find_bifurcations(tree, tol=GeometryConstants.BIFURCATION_TOL_MM, members=None):
    """Bifurcation nodes of a tree, sorted by abscissa.

    For every pair of centerlines the node is the last point of their
    shared prefix; pair nodes closer than 2 * tol merge into one node.

    :param tree: CoronaryTree
    :param tol: distance tolerance, mm
    :param members: optional subset of centerline indices
    :return: list of Bifurcation

    """

    publish_coronary_metric('analysis.geometry.find_bifurcations')
    if members is None:
        members = list(range(len(tree.centerlines)))
    if len(members) < 2:
        return []
    return _bifurcation_nodes(tree.centerlines, sorted(members), tol)


def load_tree(path):
    """Read a centerline JSON document.

    :param path: file with {"side", "ostium", "centerlines": [{"points", "radius"}]}
    :return: CoronaryTree
    :raises CenterlineFormatError: invalid UTF-8, JSON syntax, missing keys
                                   or invalid geometry

    """

    with open(path, 'rb') as fh:
        content = fh.read()
    try:
        text = content.decode('utf-8')
    except UnicodeDecodeError as error:
        raise CenterlineFormatError('{}: invalid UTF-8'.format(path), error.start)
    try:
        document = json.loads(text)
    except json.JSONDecodeError as error:
        raise CenterlineFormatError('{}: {}'.format(path, error.msg),
                                    len(text[:error.pos].encode('utf-8')))
    try:
        return tree_from_dict(document)
    except (ValueError, TypeError) as error:
        raise CenterlineFormatError('{}: {}'.format(path, error))


def _require(mapping, key, where):
    if not isinstance(mapping, dict) or key not in mapping:
        raise CenterlineFormatError('{} has no "{}"'.format(where, key))
    return mapping[key]


def tree_from_dict(document):
    entries = _require(document, 'centerlines', 'document')
    if not isinstance(entries, list):
        raise CenterlineFormatError('"centerlines" must be a list')
    centerlines = []
    for index, entry in enumerate(entries):
        where = 'centerline {}'.format(index)
        centerlines.append(Centerline(_require(entry, 'points', where),
                                      _require(entry, 'radius', where)))
    return CoronaryTree(_require(document, 'side', 'document'), centerlines,
                        document.get('ostium'))


def tree_to_dict(tree):
    return {
        'side': tree.side.value,
        'ostium': tree.ostium,
        'centerlines': [{'points': c.points, 'radius': c.radius} for c in tree.centerlines],
    }


def save_tree(tree, path):
    write_json(path, tree_to_dict(tree))
