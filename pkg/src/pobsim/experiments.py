"""Monte-Carlo experiment runner: trials, sweeps, and output files.

A scenario runs `trials` independent seeded trials (optionally in
parallel processes; aggregation is order-normalized so worker count
never changes results). Paired scenarios run both protocols per trial
under common random numbers so per-trial differences are meaningful.

Outputs per run directory:
    config.echo   - every effective parameter, reloadable as a config
    trials.csv    - one row per (trial, protocol), frozen column set
    summary.json  - per-protocol aggregates plus paired comparisons
    ledgers/      - canonical per-epoch JSON (only with emit_ledgers)
"""

from __future__ import annotations

import csv
import itertools
import json
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from .config import (
    ScenarioConfig,
    apply_sweep_point,
    echo_config,
    with_overrides,
)
from .errors import ConfigError
from .metrics import (
    CSV_COLUMNS,
    TrialMetrics,
    aggregate,
    compute_trial_metrics,
    loss_averted,
)
from .netsim import TraceBlock, ledger_to_json, run_trial

_EXTRA_SUMMARY_FIELDS = ("fraud_attempted", "fraud_accepted", "fraud_accepted_value")


def _trial_protocols(config: ScenarioConfig) -> list[str]:
    return ["pob", "pos"] if config.protocol == "paired" else [config.protocol]


def _run_trial_task(
    config: ScenarioConfig,
    trial: int,
    trace: Optional[list[TraceBlock]],
) -> dict:
    """One trial, all protocols; returns picklable rows (+ optional ledgers)."""
    seed = config.seed + trial
    rows: list[dict] = []
    ledgers_by_protocol = {}
    for protocol in _trial_protocols(config):
        ledgers = run_trial(config, seed, protocol=protocol, trace=trace)
        ledgers_by_protocol[protocol] = ledgers
        rows.append(
            {
                "trial": trial,
                "seed": seed,
                "protocol": protocol,
                "metrics": compute_trial_metrics(ledgers, config, protocol),
            }
        )
    if config.protocol == "paired":
        averted = loss_averted(ledgers_by_protocol["pob"], ledgers_by_protocol["pos"])
        for row in rows:
            if row["protocol"] == "pob":
                row["metrics"].loss_averted = averted
    out = {"trial": trial, "rows": rows}
    if config.emit_ledgers:
        out["ledgers"] = {
            protocol: [ledger_to_json(l) for l in ledgers]
            for protocol, ledgers in ledgers_by_protocol.items()
        }
    return out


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_trials_csv(path: Path, rows: Sequence[dict], extra_columns: Sequence[str] = ()) -> None:
    columns = list(extra_columns) + list(CSV_COLUMNS)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            m: TrialMetrics = row["metrics"]
            record = {
                "trial": row["trial"],
                "seed": row["seed"],
                "protocol": row["protocol"],
                "far": m.far,
                "proposer_gini": m.proposer_gini,
                "mean_latency_ms": m.mean_latency_ms,
                "newcomer_adaptation_blocks": m.newcomer_adaptation_blocks,
                "suppression_blocks": m.suppression_blocks,
                "loss_averted": m.loss_averted,
                "bottom_decile_share": m.bottom_decile_share,
                "false_positives": m.false_positives,
            }
            for col in extra_columns:
                record[col] = row.get(col)
            writer.writerow([_format_cell(record.get(c)) for c in columns])


def _summarize(config: ScenarioConfig, rows: Sequence[dict]) -> dict:
    summary: dict = {"scenario": config.name, "trials": config.trials, "protocols": {}}
    for protocol in _trial_protocols(config):
        per_trial = [r["metrics"] for r in rows if r["protocol"] == protocol]
        summary["protocols"][protocol] = aggregate(per_trial)
    if config.protocol == "paired":
        pob = {r["trial"]: r["metrics"] for r in rows if r["protocol"] == "pob"}
        pos = {r["trial"]: r["metrics"] for r in rows if r["protocol"] == "pos"}
        trials = sorted(pob)
        far_pairs = [
            (pob[t].far, pos[t].far)
            for t in trials
            if pob[t].far is not None and pos[t].far is not None
        ]
        sup_pairs = [(pob[t].suppression_blocks, pos[t].suppression_blocks) for t in trials]
        summary["paired"] = {
            "far_gap_all_trials": bool(far_pairs) and all(a < b for a, b in far_pairs),
            "loss_averted_positive_all_trials": all(
                pob[t].loss_averted is not None and pob[t].loss_averted > 0 for t in trials
            ),
            "suppression_faster_all_trials": all(
                a is not None and (b is None or a < b) for a, b in sup_pairs
            ),
            "latency_overhead_frac": _latency_overhead(pob, pos, trials),
        }
    return summary


def _latency_overhead(pob: dict, pos: dict, trials: Sequence[int]) -> Optional[float]:
    pob_mean = [pob[t].mean_latency_ms for t in trials]
    pos_mean = [pos[t].mean_latency_ms for t in trials]
    if not pob_mean or not pos_mean:
        return None
    base = sum(pos_mean) / len(pos_mean)
    if base <= 0:
        return None
    return (sum(pob_mean) / len(pob_mean) - base) / base


def run_scenario(
    config: ScenarioConfig,
    out_dir: str | Path,
    trace: Optional[Sequence[TraceBlock]] = None,
) -> dict:
    """Run all trials, write outputs, return the summary mapping."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    trace_list = list(trace) if trace is not None else None

    results = []
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = [
                pool.submit(_run_trial_task, config, trial, trace_list)
                for trial in range(config.trials)
            ]
            results = [f.result() for f in futures]
    else:
        results = [
            _run_trial_task(config, trial, trace_list) for trial in range(config.trials)
        ]

    results.sort(key=lambda r: r["trial"])
    rows = [row for result in results for row in result["rows"]]
    rows.sort(key=lambda r: (r["trial"], r["protocol"]))

    (out / "config.echo").write_text(echo_config(config), encoding="utf-8")
    write_trials_csv(out / "trials.csv", rows)
    summary = _summarize(config, rows)
    (out / "summary.json").write_text(
        json.dumps(summary, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )

    if config.emit_ledgers:
        for result in results:
            for protocol, dumps in result.get("ledgers", {}).items():
                led_dir = out / "ledgers" / f"trial-{result['trial']:03d}-{protocol}"
                led_dir.mkdir(parents=True, exist_ok=True)
                for epoch, payload in enumerate(dumps):
                    (led_dir / f"epoch-{epoch:05d}.json").write_text(
                        payload + "\n", encoding="utf-8"
                    )
    return summary


def sweep_points(config: ScenarioConfig) -> list[dict]:
    """Cartesian product of the sweep grid, deterministically ordered."""
    if not config.sweep:
        raise ConfigError("sweep", "scenario has no sweep grid")
    params = sorted(config.sweep)
    points = []
    for combo in itertools.product(*(config.sweep[p] for p in params)):
        points.append(dict(zip(params, combo)))
    return points


def run_sweep(config: ScenarioConfig, out_dir: str | Path) -> dict:
    """Run every grid point and combine rows into one long-format CSV."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    points = sweep_points(config)
    params = sorted(config.sweep)

    all_rows: list[dict] = []
    summaries: dict[str, dict] = {}
    for point in points:
        sub = apply_sweep_point(config, point)
        point_label = ",".join(f"{p}={point[p]}" for p in params)
        results = [
            _run_trial_task(sub, trial, None) for trial in range(sub.trials)
        ]
        rows = [row for result in results for row in result["rows"]]
        rows.sort(key=lambda r: (r["trial"], r["protocol"]))
        for row in rows:
            for p in params:
                row[p] = point[p]
        all_rows.extend(rows)
        summaries[point_label] = _summarize(sub, rows)

    (out / "config.echo").write_text(echo_config(config), encoding="utf-8")
    write_trials_csv(out / "sweep.csv", all_rows, extra_columns=params)
    (out / "sweep_summary.json").write_text(
        json.dumps(summaries, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    return summaries


def run_ic_check(
    config: ScenarioConfig,
    out_dir: str | Path,
    discount: float = 0.95,
) -> dict:
    """Run the empirical incentive comparison and write its report."""
    from .incentive import empirical_ic

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    base = config if config.protocol == "pob" else with_overrides(config, protocol="pob")
    report = empirical_ic(base, discount=discount)
    (out / "config.echo").write_text(echo_config(config), encoding="utf-8")
    (out / "ic.json").write_text(
        json.dumps(report, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    return report
