"""Statistics Constants."""

from enum import Enum


class Method(Enum):
    SHAPIRO_WILK = 'shapiro_wilk'
    STUDENT_T = 'student_t'
    MANN_WHITNEY_EXACT = 'mann_whitney_exact'
    MANN_WHITNEY_ASYMPTOTIC = 'mann_whitney_asymptotic'


class StatsConstants(object):
    ALPHA = 0.05
    SHAPIRO_MIN_N = 3
    SHAPIRO_MAX_N = 5000
    EXACT_MAX_N = 16
