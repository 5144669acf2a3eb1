"""Geometry Constants."""

from enum import Enum

import numpy as np


class Side(Enum):
    LEFT = 'left'
    RIGHT = 'right'


class BranchName(Enum):
    RCA = 'RCA'
    LAD = 'LAD'
    LCX = 'LCx'
    AMB = 'AMB'
    PDA_PLB = 'PDA_PLB'
    UNCLASSIFIED = 'UNCLASSIFIED'


class Dominance(Enum):
    RIGHT = 'right'
    LEFT = 'left'
    CODOMINANT = 'codominant'
    UNKNOWN = 'unknown'


MAJOR_BRANCHES = {
    Side.RIGHT: (BranchName.RCA,),
    Side.LEFT: (BranchName.LAD, BranchName.LCX),
}

# LPS: +y points to the patient's posterior
ANTERIOR = np.array([0.0, -1.0, 0.0])
POSTERIOR = np.array([0.0, 1.0, 0.0])


class GeometryConstants:
    BIFURCATION_TOL_MM = 0.5
    TANGENT_HALF_KERNEL_MM = 5.0
    LAD_MIN_LENGTH_MM = 80.0
    RCA_REL_DIFF = 0.40
    RCA_CODOMINANT_REL_DIFF = 0.15
    OSTIUM_TOL_MM = 1.0
    MIN_SEGMENT_MM = 1e-9
    SC_TIE_TOL = 1e-9
