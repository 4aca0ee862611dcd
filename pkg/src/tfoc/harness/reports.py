"""Report assembly and serialization.

The pass flag is a pure function of the recorded rows, the recorded checks
and the configured drift threshold.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import defaultdict
from pathlib import Path

__all__ = ["summarize", "build_report", "aborted_report", "to_json", "to_csv", "write_report"]


def _drift(by_n: dict) -> float:
    vals = [by_n[n] for n in sorted(by_n)]
    hi, lo = max(vals), min(vals)
    if hi == 0:
        return 1.0
    return hi / lo if lo > 0 else math.inf


def summarize(cases: list[dict], drift_limit: float) -> dict:
    groups: dict = defaultdict(dict)
    info: dict = {}
    for c in cases:
        key = (c["suite"], c["phase"])
        n = c["N"]
        groups[key][n] = max(groups[key].get(n, 0.0), c["ratio"])
        info[key] = bool(c.get("informational", False))
    suites = []
    for (suite, phase), by_n in sorted(groups.items()):
        finite = all(math.isfinite(v) for v in by_n.values())
        drift = _drift(by_n) if finite else math.inf
        suites.append({
            "suite": suite,
            "phase": phase,
            "max_ratio_by_N": {str(n): by_n[n] for n in sorted(by_n)},
            "drift": drift,
            "finite": finite,
            "informational": info[(suite, phase)],
            "pass": bool(finite and drift < drift_limit),
        })
    scored = [s for s in suites if not s["informational"]]
    return {
        "n_cases": len(cases),
        "max_ratio": max((c["ratio"] for c in cases), default=0.0),
        "max_drift": max((s["drift"] for s in scored), default=1.0),
        "drift_limit": drift_limit,
        "suites": suites,
    }


def build_report(cfg, config_hash: str, result: dict) -> dict:
    summary = summarize(result["cases"], cfg.tolerance("drift"))
    checks = result.get("checks", [])
    failed_checks = [c for c in checks if "pass" in c and not c["pass"]]
    summary["failed_checks"] = len(failed_checks)
    summary["annotations"] = result.get("annotations", {})
    ok = all(s["pass"] for s in summary["suites"] if not s["informational"]) and not failed_checks
    return {
        "experiment_id": cfg.experiment_id,
        "kind": cfg.kind,
        "config_hash": config_hash,
        "corpus_seed": cfg.corpus_seed,
        "status": "completed",
        "cases": result["cases"],
        "checks": checks,
        "summary": summary,
        "pass": bool(ok),
    }


def aborted_report(cfg, config_hash: str, message: str, diagnostics: dict) -> dict:
    return {
        "experiment_id": cfg.experiment_id,
        "kind": cfg.kind,
        "config_hash": config_hash,
        "corpus_seed": cfg.corpus_seed,
        "status": "aborted",
        "diagnostic": message,
        "diagnostics": diagnostics,
        "cases": [],
        "checks": [],
        "summary": {},
        "pass": False,
    }


def _clean(obj):
    # JSON has no inf/nan; spell them out so the output stays standard
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item"):
        return _clean(obj.item())
    return obj


def to_json(report: dict) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=2) + "\n"


def to_csv(report: dict) -> str:
    rows = report.get("cases", [])
    fields = sorted({k for r in rows for k in r})
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    return buf.getvalue()


def write_report(report: dict, out_dir: Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    base = out_dir / report["experiment_id"]
    paths = [base.with_suffix(".json"), base.with_suffix(".csv")]
    paths[0].write_text(to_json(report))
    paths[1].write_text(to_csv(report))
    return paths
