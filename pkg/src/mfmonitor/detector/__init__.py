"""Randomised eigenvalue sequence and the sequential detectors."""

from .calibration import (CriticalValueEntry, CriticalValueTable, calibrate_sup_functional,
                          calibrate_sup_functionals, default_table)
from .config import (DarlingErdos, DetectorConfig, PartialSum, Renyi, WorstCase, family_spec,
                     parse_family)
from .diagnostics import check_restriction, power_condition_report, rate_sequence
from .monitor import (Monitor, MonitorRun, MonitorState, Verdict, VoteResult,
                      monitor_with_restarts, replication_vote, run_monitor, step)
from .norming import (darling_erdos_critical_value, darling_erdos_norming,
                      gaussian_max_norming, worst_case_critical_value)
from .statistics import (compensated_cumsum, evaluate_family, stat_darling_erdos,
                         stat_partial_sum, stat_renyi, stat_worst_case)
from .transforms import g_exp_pow, g_vanish, psi_value, select_delta

__all__ = [
    "CriticalValueEntry", "CriticalValueTable", "calibrate_sup_functional",
    "calibrate_sup_functionals", "default_table", "DarlingErdos", "DetectorConfig",
    "PartialSum", "Renyi", "WorstCase", "family_spec", "parse_family", "check_restriction",
    "power_condition_report", "rate_sequence", "Monitor", "MonitorRun", "MonitorState",
    "Verdict", "VoteResult", "monitor_with_restarts", "replication_vote", "run_monitor", "step",
    "darling_erdos_critical_value", "darling_erdos_norming", "gaussian_max_norming",
    "worst_case_critical_value", "compensated_cumsum", "evaluate_family",
    "stat_darling_erdos", "stat_partial_sum", "stat_renyi", "stat_worst_case", "g_exp_pow",
    "g_vanish", "psi_value", "select_delta",
]
