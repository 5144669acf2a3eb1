from .constants import Method, StatsConstants
from .hypothesis import TestResult, shapiro_wilk, students_t, mann_whitney_u
from .groups import GroupComparison, describe, compare_groups, stratify_by_criterion, \
    comparison_summary
