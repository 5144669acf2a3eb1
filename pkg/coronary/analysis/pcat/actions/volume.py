"""Voxel grids, HU volumes, binary masks and their header/raw file pairs."""

import json
import logging
import os

import numpy as np

from coronary.miscellaneous.convert import canonical_json
from coronary.miscellaneous.errors import GridMismatchError, MissingInputError, \
    VolumeFormatError
from .constants import PcatConstants, VOLUME_DTYPE, MASK_DTYPE, VOXEL_ORDER

logger = logging.getLogger(__name__)

HEADER_SUFFIX = '.vol.json'
RAW_SUFFIX = '.vol.raw'
_NUMPY_DTYPES = {VOLUME_DTYPE: np.dtype('<i2'), MASK_DTYPE: np.dtype('u1')}


class VoxelGrid:
    """Geometry shared by a volume and its masks.

    A voxel index (i, j, k) has its center at
    origin + direction @ (spacing * (i, j, k)), with the axis directions
    as the columns of the row-major direction matrix.
    """

    def __init__(self, dims, spacing, origin=(0.0, 0.0, 0.0), direction=None):
        dims = tuple(int(d) for d in dims)
        spacing = np.array(spacing, dtype=float)
        origin = np.array(origin, dtype=float)
        direction = np.eye(3) if direction is None else np.array(direction, dtype=float)
        direction = direction.reshape(3, 3)
        if len(dims) != 3 or any(d <= 0 for d in dims):
            raise ValueError('dims must be three positive integers, got {}'.format(dims))
        if spacing.shape != (3,) or not np.all(np.isfinite(spacing)) or np.any(spacing <= 0):
            raise ValueError('spacing must be three values > 0, got {}'.format(spacing))
        if origin.shape != (3,) or not np.all(np.isfinite(origin)):
            raise ValueError('origin must be three finite values, got {}'.format(origin))
        if np.max(np.abs(direction @ direction.T - np.eye(3))) > PcatConstants.ORTHONORMAL_TOL:
            raise ValueError('direction matrix is not orthonormal')
        for array in (spacing, origin, direction):
            array.setflags(write=False)
        self.dims = dims
        self.spacing = spacing
        self.origin = origin
        self.direction = direction

    def __eq__(self, other):
        return (isinstance(other, VoxelGrid) and self.dims == other.dims
                and np.array_equal(self.spacing, other.spacing)
                and np.array_equal(self.origin, other.origin)
                and np.array_equal(self.direction, other.direction))

    def __repr__(self):
        return 'VoxelGrid(dims={}, spacing={})'.format(self.dims, self.spacing.tolist())

    @property
    def voxel_volume(self):
        return float(np.prod(self.spacing))

    @property
    def size(self):
        return int(np.prod(self.dims))

    def relative_position(self, ijk):
        """Voxel centers relative to the origin, mm."""
        return (np.asarray(ijk, dtype=float) * self.spacing) @ self.direction.T

    def continuous_index(self, relative):
        """Inverse of relative_position (fractional indices)."""
        return (np.asarray(relative, dtype=float) @ self.direction) / self.spacing

    def header(self, dtype):
        return {
            'dims': list(self.dims),
            'spacing': self.spacing,
            'origin': self.origin,
            'direction': self.direction.ravel(),
            'dtype': dtype,
            'order': VOXEL_ORDER,
        }

    def check_same(self, other, what='mask'):
        if self != other:
            raise GridMismatchError('{} grid {} does not match volume grid {}'.format(
                what, other, self))


class VoxelVolume:
    """Signed 16-bit HU values indexed data[i, j, k]."""

    def __init__(self, grid, data):
        data = np.asarray(data)
        if data.shape != grid.dims:
            raise ValueError('data shape {} does not match dims {}'.format(data.shape, grid.dims))
        if not np.issubdtype(data.dtype, np.integer):
            raise ValueError('HU data must be integral, got {}'.format(data.dtype))
        if data.size and (data.min() < np.iinfo(np.int16).min or data.max() > np.iinfo(np.int16).max):
            raise ValueError('HU data does not fit in 16 bits')
        self.grid = grid
        self.data = data.astype(np.int16)


class BinaryMask:
    """Selected voxels of a grid; flags carry non-fatal conditions."""

    def __init__(self, grid, data, flags=()):
        data = np.asarray(data, dtype=bool)
        if data.shape != grid.dims:
            raise ValueError('mask shape {} does not match dims {}'.format(data.shape, grid.dims))
        self.grid = grid
        self.data = data
        self.flags = tuple(flags)

    @property
    def count(self):
        return int(np.count_nonzero(self.data))

    @classmethod
    def empty(cls, grid, flags=()):
        return cls(grid, np.zeros(grid.dims, dtype=bool), flags)

    def __or__(self, other):
        self.grid.check_same(other.grid)
        return BinaryMask(self.grid, self.data | other.data, self.flags + other.flags)

    def __sub__(self, other):
        self.grid.check_same(other.grid)
        return BinaryMask(self.grid, self.data & ~other.data, self.flags)


def volume_paths(path):
    """(header, raw) file names of a volume given its base name or either file."""
    for suffix in (HEADER_SUFFIX, RAW_SUFFIX):
        if path.endswith(suffix):
            path = path[:-len(suffix)]
    return path + HEADER_SUFFIX, path + RAW_SUFFIX


def _write_pair(path, grid, dtype, values):
    header_path, raw_path = volume_paths(path)
    with open(header_path, 'w') as fh:
        fh.write(canonical_json(grid.header(dtype)))
    with open(raw_path, 'wb') as fh:
        fh.write(np.asarray(values).astype(_NUMPY_DTYPES[dtype]).ravel(order='F').tobytes())
    logger.debug('wrote {} and {}'.format(header_path, raw_path))


def _byte_offset(text, key):
    position = text.find('"{}"'.format(key))
    return len(text[:max(position, 0)].encode('utf-8'))


def _read_pair(path, dtype):
    header_path, raw_path = volume_paths(path)
    for name in (header_path, raw_path):
        if not os.path.exists(name):
            raise MissingInputError('missing input file {}'.format(name))
    with open(header_path, 'rb') as fh:
        content = fh.read()
    text = content.decode('utf-8')
    try:
        header = json.loads(text)
    except json.JSONDecodeError as error:
        offset = len(text[:error.pos].encode('utf-8'))
        raise VolumeFormatError('{}: {}'.format(header_path, error.msg), offset)

    for key in ('dims', 'spacing', 'origin', 'direction', 'dtype', 'order'):
        if key not in header:
            raise VolumeFormatError('{}: missing "{}"'.format(header_path, key), len(content))
    if header['dtype'] != dtype:
        raise VolumeFormatError('{}: dtype "{}", expected "{}"'.format(
            header_path, header['dtype'], dtype), _byte_offset(text, 'dtype'))
    if header['order'] != VOXEL_ORDER:
        raise VolumeFormatError('{}: order "{}", expected "{}"'.format(
            header_path, header['order'], VOXEL_ORDER), _byte_offset(text, 'order'))
    try:
        grid = VoxelGrid(header['dims'], header['spacing'], header['origin'], header['direction'])
    except (ValueError, TypeError) as error:
        raise VolumeFormatError('{}: {}'.format(header_path, error), _byte_offset(text, 'dims'))

    with open(raw_path, 'rb') as fh:
        raw = fh.read()
    itemsize = _NUMPY_DTYPES[dtype].itemsize
    expected = grid.size * itemsize
    if len(raw) != expected:
        raise VolumeFormatError('{}: {} bytes for dims {}, expected {}'.format(
            raw_path, len(raw), grid.dims, expected), min(len(raw), expected))
    values = np.frombuffer(raw, dtype=_NUMPY_DTYPES[dtype]).reshape(grid.dims, order='F')
    return grid, values


def save_volume(volume, path):
    """Write NAME.vol.json and NAME.vol.raw (little-endian int16, x fastest)."""
    _write_pair(path, volume.grid, VOLUME_DTYPE, volume.data)


def load_volume(path):
    """Read a volume pair.

    :param path: base name, header or raw file
    :return: VoxelVolume
    :raises MissingInputError: header or raw file absent
    :raises VolumeFormatError: invalid header or raw length

    """

    grid, values = _read_pair(path, VOLUME_DTYPE)
    return VoxelVolume(grid, values.astype(np.int16))


def save_mask(mask, path):
    _write_pair(path, mask.grid, MASK_DTYPE, mask.data)


def load_mask(path):
    grid, values = _read_pair(path, MASK_DTYPE)
    invalid = np.flatnonzero(values.ravel(order='F') > 1)
    if len(invalid):
        raise VolumeFormatError('{}: mask values must be 0 or 1'.format(volume_paths(path)[1]),
                                int(invalid[0]))
    return BinaryMask(grid, values.astype(bool))
