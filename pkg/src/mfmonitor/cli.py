"""Command-line interface.

Subcommands: ``monitor``, ``simulate``, ``calibrate``, ``estimate-k`` and
``export``. Statistical settings come from an INI file and/or flags (flags
win); environment variables may only redirect outputs
(``MFMONITOR_REPORT``, ``MFMONITOR_PLOT``, ``MFMONITOR_OUTPUT``) and set
the worker count (``MFMONITOR_THREADS``).

Exit codes: 0 success with no break, 2 break detected (``monitor``), 1 error.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import logging
import os
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence

from . import __version__
from .detector.calibration import (DEFAULT_PATHS, DEFAULT_STEPS, CriticalValueTable,
                                   default_table)
from .detector.config import DetectorConfig, parse_family
from .detector.monitor import replication_vote, run_monitor
from .errors import ConfigError, MonitorError
from .io import FORMATS, export, ingest
from .linalg import eigenvalue_ratio_k, eigh_sym
from .projection import flattened_cov_rows, initial_projection, rolling_projected_cov
from .report import build_report, dumps_report, write_plot_data, write_report
from .series import MatrixSeries
from .simulate import SCENARIOS, TABLE_FAMILIES, DgpSpec, generate, run_table

_log = logging.getLogger("mfmonitor")

CONFIG_SCHEMA = 1
EXIT_OK, EXIT_ERROR, EXIT_BREAK = 0, 1, 2
ENV_REPORT, ENV_PLOT, ENV_OUTPUT, ENV_THREADS = (
    "MFMONITOR_REPORT", "MFMONITOR_PLOT", "MFMONITOR_OUTPUT", "MFMONITOR_THREADS")

_DETECTOR_KEYS = {
    "k1": str, "m": int, "family": str, "alpha": float, "epsilon": float,
    "delta_override": float, "q": float, "direction": str, "vanish_transform": str,
    "rng_seed": int, "projection": str, "k_tilde": int, "train_start": int, "horizon": int,
}
_SIM_KEYS = {
    "p1": int, "p2": int, "T": int, "k1": int, "k2": int, "phi": float, "psi_ar": float,
    "scenario": str, "t_star": int, "seed": int,
}


def load_ini(path) -> Dict[str, Dict[str, str]]:
    """Read an INI run file into plain dictionaries, checking the schema."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    parser.optionxform = str
    if not parser.read(path, encoding="utf-8"):
        raise ConfigError(f"config file not found: {path}")
    schema = parser.get("meta", "schema", fallback=str(CONFIG_SCHEMA))
    if schema != str(CONFIG_SCHEMA):
        raise ConfigError(f"unsupported config schema {schema!r}")
    return {s: dict(parser[s]) for s in parser.sections()}


def _typed(section: Mapping[str, str], keys: Mapping[str, type], name: str) -> dict:
    out = {}
    for k, v in section.items():
        if k not in keys:
            raise ConfigError(f"unknown key {k!r} in [{name}]")
        try:
            out[k] = keys[k](v)
        except ValueError:
            raise ConfigError(f"[{name}] {k}={v!r} is not a valid {keys[k].__name__}") from None
    return out


@dataclass
class RunConfig:
    """Fully resolved settings for ``monitor``."""

    detector: Dict[str, object]
    input_path: Optional[str] = None
    input_format: Optional[str] = None
    simulation: Optional[Dict[str, object]] = None
    report_path: Optional[str] = None
    plot_path: Optional[str] = None
    cv_cache: Optional[str] = None
    timing: bool = False
    vote: int = 0
    verbosity: int = 0

    def __post_init__(self):
        if (self.input_path is None) == (self.simulation is None):
            raise ConfigError("give exactly one of an input file or a simulation spec")
        if self.input_path is not None and not Path(self.input_path).is_file():
            raise FileNotFoundError(f"input file not found: {self.input_path}")
        for p in (self.report_path, self.plot_path):
            if p is not None and not Path(p).resolve().parent.is_dir():
                raise ConfigError(f"output directory does not exist for {p}")


def _source_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("data source (file or simulation)")
    g.add_argument("--config", help="INI run file")
    g.add_argument("--input", help="data file (long CSV or MCPD binary)")
    g.add_argument("--format", choices=FORMATS, help="input format (default: sniffed)")
    g.add_argument("--scenario", choices=SCENARIOS, help="simulate instead of reading a file")
    g.add_argument("--p1", type=int)
    g.add_argument("--p2", type=int)
    g.add_argument("--T", type=int)
    g.add_argument("--t-star", type=int, dest="t_star")
    g.add_argument("--sim-seed", type=int, dest="sim_seed")


def _detector_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("detector")
    g.add_argument("--k1", help="row factor count or 'auto' (eigenvalue ratio)")
    g.add_argument("--m", type=int, help="training and rolling window length")
    g.add_argument("--family", help="partial_sum:ETA | darling_erdos | renyi:ETA[,R] | worst_case")
    g.add_argument("--alpha", type=float)
    g.add_argument("--epsilon", type=float)
    g.add_argument("--delta", type=float, dest="delta_override")
    g.add_argument("--q", type=float)
    g.add_argument("--direction", choices=("emerge", "vanish"))
    g.add_argument("--vanish-transform", dest="vanish_transform",
                   choices=("reciprocal", "exp_inverse"))
    g.add_argument("--seed", type=int, dest="rng_seed")
    g.add_argument("--projection", choices=("frozen", "rolling"))
    g.add_argument("--k-tilde", type=int, dest="k_tilde")
    g.add_argument("--train-start", type=int, dest="train_start")
    g.add_argument("--horizon", type=int, help="monitoring horizon T_m (default: all data)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mfmonitor", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"mfmonitor {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("monitor", help="monitor a series and report the verdict")
    _source_args(p)
    _detector_args(p)
    p.add_argument("--report", help="JSON report path (env MFMONITOR_REPORT)")
    p.add_argument("--plot", help="TSV plot-data path (env MFMONITOR_PLOT)")
    p.add_argument("--cv-cache", help="extra critical value cache file")
    p.add_argument("--timing", action="store_true",
                   help="include wall-clock timing in the report (breaks byte reproducibility)")
    p.add_argument("--vote", type=int, default=0,
                   help="also run a replication vote with this many seeds")

    p = sub.add_parser("simulate", help="size or median-delay tables over a grid")
    p.add_argument("--config", help="INI file with a [simulate] section")
    p.add_argument("--grid", action="append", help="cell m,p1,p2 (repeatable)")
    p.add_argument("--scenario", choices=SCENARIOS)
    p.add_argument("--families", help="semicolon-separated family specs (default: table columns)")
    p.add_argument("--alphas", help="comma-separated levels (default 0.05,0.1)")
    p.add_argument("--reps", type=int)
    p.add_argument("--T", type=int)
    p.add_argument("--t-star", type=int, dest="t_star")
    p.add_argument("--seed", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--k-tilde", type=int, dest="k_tilde")
    p.add_argument("--projection", choices=("frozen", "rolling"))
    p.add_argument("--jobs", type=int, help="worker processes (env MFMONITOR_THREADS)")
    p.add_argument("--output", help="text table path (env MFMONITOR_OUTPUT); default stdout")
    p.add_argument("--json", help="machine-readable table path")

    p = sub.add_parser("calibrate", help="Monte Carlo critical values into a cache file")
    p.add_argument("--weights", default="0", help="comma-separated weights in [0, 1)")
    p.add_argument("--alphas", default="0.05,0.1")
    p.add_argument("--paths", type=int, default=DEFAULT_PATHS)
    p.add_argument("--steps", type=int, default=DEFAULT_STEPS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cache", default="critical_values.json", help="cache file (created or extended)")

    p = sub.add_parser("estimate-k", help="eigenvalue-ratio factor counts on a window")
    _source_args(p)
    p.add_argument("--window", help="0-based half-open range START:STOP (default 0:m)")
    p.add_argument("--m", type=int, default=50)
    p.add_argument("--k-max", type=int, default=8, dest="k_max")
    p.add_argument("--k-tilde", type=int, default=8, dest="k_tilde")

    p = sub.add_parser("export", help="write a series (file or simulation) to CSV or binary")
    _source_args(p)
    p.add_argument("--output", required=True)
    p.add_argument("--to", choices=FORMATS, default="binary", dest="to_format")
    return parser


def _sections(args) -> Dict[str, Dict[str, str]]:
    return load_ini(args.config) if getattr(args, "config", None) else {}


def _source(args, ini) -> tuple:
    """Return ``(input_path, input_format, simulation_dict)``."""
    inp = dict(ini.get("input", {}))
    sim = _typed(ini.get("simulation", {}), _SIM_KEYS, "simulation")
    path = args.input or inp.get("path")
    fmt = args.format or inp.get("format")
    flags = {"scenario": args.scenario, "p1": args.p1, "p2": args.p2, "T": args.T,
             "t_star": args.t_star, "seed": args.sim_seed}
    if args.input is not None:
        sim = {}
    sim.update({k: v for k, v in flags.items() if v is not None})
    if args.scenario is not None:
        path = None
    if sim and path is None:
        if "p1" not in sim or "p2" not in sim:
            raise ConfigError("simulation needs p1 and p2")
        sim.setdefault("scenario", "null")
        return None, None, sim
    if path is None:
        raise ConfigError("no data source: give --input or --scenario/--p1/--p2")
    return path, fmt, None


def _load_series(path, fmt, sim) -> tuple:
    if path is not None:
        series = ingest(path, fmt)
        digest = hashlib.sha256(Path(path).read_bytes()).hexdigest()
        return series, {"type": "file", "path": str(path), "format": fmt or "auto",
                        "sha256": digest}
    spec = DgpSpec(**sim)
    return generate(spec), {"type": "simulation", **asdict(spec)}


def resolve_run_config(args, env: Mapping[str, str]) -> RunConfig:
    ini = _sections(args)
    path, fmt, sim = _source(args, ini)
    det = _typed(ini.get("detector", {}), _DETECTOR_KEYS, "detector")
    for k in _DETECTOR_KEYS:
        v = getattr(args, k, None)
        if v is not None:
            det[k] = v
    out = ini.get("output", {})
    report = args.report or env.get(ENV_REPORT) or out.get("report")
    plot = args.plot or env.get(ENV_PLOT) or out.get("plot")
    return RunConfig(det, path, fmt, sim, report, plot, args.cv_cache, args.timing, args.vote,
                     args.verbose)


def estimate_k1(series: MatrixSeries, start: int, m: int, k_tilde: int = 8,
                k_max: int = 8) -> int:
    """Eigenvalue-ratio estimate of the row factor count on ``[start, start + m)``."""
    proj = initial_projection(series, (start, start + m), min(k_tilde, series.p2))
    cov = rolling_projected_cov(series, proj, start, m)
    return eigenvalue_ratio_k(eigh_sym(cov, want_vectors=False), min(k_max, series.p1 - 1))


def _detector_config(det: Dict[str, object], series: MatrixSeries) -> tuple:
    det = dict(det)
    k_tilde = int(det.pop("k_tilde", 8))
    train_start = int(det.pop("train_start", 0))
    horizon = det.pop("horizon", None)
    m = int(det.get("m", 50))
    det["m"] = m
    k1 = str(det.pop("k1", "auto"))
    if k1 == "auto":
        k1 = estimate_k1(series, train_start, m, k_tilde)
        _log.info("estimated k1=%d on training window", k1)
    det["k1"] = int(k1)
    det["family"] = parse_family(str(det.get("family", "partial_sum:0")))
    det["T_m"] = None if horizon is None else int(horizon)
    return DetectorConfig(**det), k_tilde, train_start


def cmd_monitor(args, env: Mapping[str, str]) -> int:
    rc = resolve_run_config(args, env)
    t0 = time.perf_counter()
    series, source = _load_series(rc.input_path, rc.input_format, rc.simulation)
    config, k_tilde, train_start = _detector_config(rc.detector, series)
    table = default_table()
    if rc.cv_cache:
        table = table.merged(CriticalValueTable.load(rc.cv_cache))
    run = run_monitor(series, config, k_tilde, train_start, table)
    elapsed = time.perf_counter() - t0
    _log.info("monitoring took %.3fs", elapsed)
    report = build_report(run, source, k_tilde,
                          timing={"seconds": elapsed} if rc.timing else None)
    if rc.vote:
        vote = replication_vote(series, run.config, rc.vote, k_tilde=k_tilde,
                                train_start=train_start, table=table)
        report["vote"] = {"n_reps": rc.vote, "fraction": vote.fraction,
                          "declared": vote.declared, "median_tau_hat": vote.median_tau_hat}
    v = run.verdict
    if rc.report_path:
        write_report(report, rc.report_path)
    if rc.plot_path:
        write_plot_data(run, rc.plot_path)
    if not rc.report_path:
        sys.stdout.write(dumps_report({"verdict": report["verdict"]}))
    else:
        msg = f"break detected at tau={v.tau_hat}" if v.rejected else "no break detected"
        print(f"{msg} ({v.family}, critical value {v.critical_value:.4f})")
    return EXIT_BREAK if v.rejected else EXIT_OK


def _float_list(text: str) -> List[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def cmd_simulate(args, env: Mapping[str, str]) -> int:
    ini = _sections(args).get("simulate", {})
    grid_text = args.grid or ([g for g in ini["grid"].split(";")] if "grid" in ini else
                              ["50,50,20", "100,100,80"])
    grid = [tuple(int(v) for v in g.split(",")) for g in grid_text]
    if any(len(g) != 3 for g in grid):
        raise ConfigError("grid cells must be m,p1,p2")
    fam_text = args.families or ini.get("families")
    families = (TABLE_FAMILIES if not fam_text else
                tuple(parse_family(f) for f in fam_text.split(";") if f.strip()))
    alphas = _float_list(args.alphas or ini.get("alphas", "0.05,0.1"))

    def pick(name, default, cast):
        v = getattr(args, name)
        return v if v is not None else cast(ini.get(name, default))

    jobs = args.jobs if args.jobs is not None else int(env.get(ENV_THREADS, ini.get("jobs", 1)))
    t_star = args.t_star if args.t_star is not None else (
        int(ini["t_star"]) if "t_star" in ini else None)
    res = run_table(grid, families, alphas, n_reps=pick("reps", 1000, int),
                    scenario=pick("scenario", "null", str), T=pick("T", 200, int),
                    master_seed=pick("seed", 0, int), n_jobs=jobs,
                    k_tilde=pick("k_tilde", 8, int), epsilon=pick("epsilon", 0.05, float),
                    t_star=t_star, projection=pick("projection", "frozen", str))
    text = res.to_text()
    output = args.output or env.get(ENV_OUTPUT) or ini.get("output")
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.json:
        Path(args.json).write_text(json.dumps(res.to_dict(), sort_keys=True, indent=1) + "\n",
                                   encoding="utf-8")
    return EXIT_OK


def cmd_calibrate(args, env: Mapping[str, str]) -> int:
    cache = Path(args.cache)
    table = CriticalValueTable.load(cache) if cache.is_file() else CriticalValueTable()
    weights, alphas = _float_list(args.weights), _float_list(args.alphas)
    before = len(table)
    entries = table.calibrate(weights, alphas, args.paths, args.steps, args.seed)
    table.save(cache)
    print(f"# {len(table) - before} new, {len(entries) - (len(table) - before)} cached -> {cache}")
    print("weight\talpha\tvalue\tn_paths\tn_steps\tseed")
    for e in entries:
        print(f"{e.weight!r}\t{e.alpha!r}\t{e.value!r}\t{e.n_paths}\t{e.n_steps}\t{e.seed}")
    return EXIT_OK


def cmd_estimate_k(args, env: Mapping[str, str]) -> int:
    path, fmt, sim = _source(args, _sections(args))
    series, _ = _load_series(path, fmt, sim)
    if args.window:
        a, _, b = args.window.partition(":")
        start, stop = int(a), int(b)
    else:
        start, stop = 0, min(args.m, series.T)
    start, stop = series.check_window((start, stop))
    k2 = eigenvalue_ratio_k(eigh_sym(flattened_cov_rows(series, (start, stop)), False),
                            min(args.k_max, series.p2 - 1))
    k1 = estimate_k1(series, start, stop - start, args.k_tilde, args.k_max)
    print(json.dumps({"k1": k1, "k2": k2, "window": [start, stop]}, sort_keys=True))
    return EXIT_OK


def cmd_export(args, env: Mapping[str, str]) -> int:
    path, fmt, sim = _source(args, _sections(args))
    series, _ = _load_series(path, fmt, sim)
    export(series, args.output, args.to_format)
    print(f"wrote T={series.T}, p1={series.p1}, p2={series.p2} to {args.output}")
    return EXIT_OK


COMMANDS = {"monitor": cmd_monitor, "simulate": cmd_simulate, "calibrate": cmd_calibrate,
            "estimate-k": cmd_estimate_k, "export": cmd_export}


def main(argv: Optional[Sequence[str]] = None, env: Optional[Mapping[str, str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)
    env = os.environ if env is None else env
    try:
        return COMMANDS[args.command](args, env)
    except (MonitorError, OSError, KeyError, ValueError) as exc:
        print(f"mfmonitor: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
