"""Run every configured experiment and write the report bundle."""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from ..errors import ConfigurationError, HypothesisError
from .config import ExperimentConfig, RunConfig, config_hash, load_config
from .experiments import EXPERIMENTS
from .reports import aborted_report, build_report, to_json, write_report

__all__ = ["run_experiment", "run_all", "EXIT_OK", "EXIT_FAIL", "EXIT_CONFIG"]

log = logging.getLogger(__name__)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def run_experiment(cfg: ExperimentConfig) -> tuple[dict, float]:
    """Report plus wall time. Failed hypotheses give an aborted report, never a pass."""
    digest = config_hash(cfg)
    start = time.perf_counter()
    try:
        result = EXPERIMENTS[cfg.kind](cfg)
        report = build_report(cfg, digest, result)
    except HypothesisError as exc:
        report = aborted_report(cfg, digest, str(exc), exc.diagnostics)
    return report, time.perf_counter() - start


def _run_many(configs: list[ExperimentConfig], workers: int):
    if workers <= 1 or len(configs) <= 1:
        return [run_experiment(c) for c in configs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_experiment, configs))


def run_all(config, output_dir=None) -> tuple[int, list[dict]]:
    """Exit code and reports. Malformed configs give exit 2 with nothing written."""
    try:
        run_cfg = config if isinstance(config, RunConfig) else load_config(config)
    except ConfigurationError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG, []
    out = Path(output_dir or run_cfg.output_dir)
    results = _run_many(run_cfg.experiments, run_cfg.workers)
    reports = []
    timing = {}
    # single writer: every file is written here, after the pool is done
    for report, seconds in results:
        write_report(report, out)
        reports.append(report)
        timing[report["experiment_id"]] = round(seconds, 3)
        status = "PASS" if report["pass"] else ("ABORTED" if report["status"] == "aborted" else "FAIL")
        log.info("%s %s (%.1fs)", status, report["experiment_id"], seconds)
        if report["status"] == "aborted":
            log.warning("%s: %s", report["experiment_id"], report["diagnostic"])
    bundle = {
        "experiments": [{"experiment_id": r["experiment_id"], "config_hash": r["config_hash"],
                         "status": r["status"], "pass": r["pass"]} for r in reports],
        "pass": all(r["pass"] for r in reports),
    }
    out.mkdir(parents=True, exist_ok=True)
    (out / "bundle.json").write_text(to_json(bundle))
    (out / "timing.json").write_text(json.dumps(timing, sort_keys=True, indent=2) + "\n")
    return (EXIT_OK if bundle["pass"] else EXIT_FAIL), reports
