"""Run reports (JSON) and per-step plot data (TSV).

Floats are written in shortest round-trip form and keys are sorted, so a
report is a deterministic function of its inputs. Wall-clock timing is
left out unless explicitly requested.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Dict, Optional

from . import __version__
from .detector.monitor import MonitorRun

PLOT_COLUMNS = ("tau", "lambda", "psi", "y", "S", "stat", "threshold")
REPORT_SCHEMA = 1


def _clean(obj: Any) -> Any:
    """Replace non-finite floats by ``None`` and tuples by lists."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "tolist"):
        return _clean(obj.tolist())
    return obj


def build_report(run: MonitorRun, source: Dict[str, Any], k_tilde: int,
                 timing: Optional[Dict[str, float]] = None) -> Dict[str, Any]:
    """Assemble the report dictionary for a monitoring run.

    ``source`` describes where the data came from (file path and digest,
    or the simulation spec) and is echoed verbatim.
    """
    st, v = run.state, run.verdict
    report = {
        "schema": REPORT_SCHEMA,
        "tool": {"name": "mfmonitor", "version": __version__},
        "source": source,
        "config": {**run.config.to_dict(), "k_tilde": k_tilde, "train_start": run.train_start},
        "projection": {"k_tilde": run.projection.k_tilde,
                       "training_window": list(run.projection.source_window)},
        "seeds": {"rng_seed": run.config.rng_seed},
        "delta": st.delta,
        "verdict": {
            "rejected": v.rejected,
            "tau_hat": v.tau_hat,
            "break_index": run.break_index,
            "statistic": v.statistic,
            "critical_value": v.critical_value,
            "family": v.family,
        },
        "trajectories": {
            "lambda": st.lambda_path,
            "trace_mean": st.trace_path,
            "psi": st.psi_path,
            "z": st.z_path,
            "y": st.y_path,
            "S": st.s_path,
            "stat": st.stat_path,
            "threshold": st.threshold_path,
        },
    }
    if timing is not None:
        report["timing"] = timing
    return _clean(report)


def dumps_report(report: Dict[str, Any]) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=1, allow_nan=False) + "\n"


def write_report(report: Dict[str, Any], path) -> None:
    Path(path).write_text(dumps_report(report), encoding="utf-8")


def _fmt(x: float) -> str:
    return repr(float(x))


def plot_rows(run: MonitorRun):
    st = run.state
    for k in range(st.tau):
        yield (str(k + 1), _fmt(st.lambda_path[k]), _fmt(st.psi_path[k]), _fmt(st.y_path[k]),
               _fmt(st.s_path[k]), _fmt(st.stat_path[k]), _fmt(st.threshold_path[k]))


def dumps_plot_data(run: MonitorRun) -> str:
    lines = ["\t".join(PLOT_COLUMNS)] + ["\t".join(r) for r in plot_rows(run)]
    return "\n".join(lines) + "\n"


def write_plot_data(run: MonitorRun, path) -> None:
    """Tab-separated trajectories, one row per monitoring step."""
    Path(path).write_text(dumps_plot_data(run), encoding="utf-8")
