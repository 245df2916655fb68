"""Concurrent workload driver and metric aggregation.

Spawns N independent client workers against a running server; each worker
replays its query list sequentially in the configured mode. Per-query request
counts, transferred body bytes, execution time, and time-to-first-result are
collected into a report written as JSON plus a TSV summary.

Transferred bytes count request and response bodies only (HTTP headers are
excluded for reproducibility across stacks); server CPU load is not measured.
"""
from __future__ import annotations

import json
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .client import (
    DEFAULT_TIMEOUT_S,
    HttpTransport,
    TransportError,
    run_query,
)

REPORT_NOTE = (
    "NTB counts request+response bodies only (headers excluded); "
    "server CPU load is not measured."
)


@dataclass
class WorkloadQuery:
    qid: str
    label: str
    text: str


@dataclass
class WorkloadConfig:
    mode: str
    clients: int
    queries: Sequence[WorkloadQuery]
    server_url: str
    dataset: str
    timeout_s: float = DEFAULT_TIMEOUT_S
    label: str = ""
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.clients < 1:
            raise ValueError("clients must be >= 1")
        if not self.queries:
            raise ValueError("workload needs at least one query")


@dataclass
class QueryMetrics:
    qid: str
    label: str
    client: int
    nrs: int
    ntb: int
    qet_ms: float
    qrt_ms: float
    results: int
    timed_out: bool
    error: str | None = None


@dataclass
class MetricsReport:
    config: dict
    per_query: list[QueryMetrics]
    aggregates: dict
    note: str = REPORT_NOTE


def _run_client(cfg: WorkloadConfig, client_id: int) -> list[QueryMetrics]:
    transport = HttpTransport(cfg.server_url)
    out: list[QueryMetrics] = []
    try:
        for wq in cfg.queries:
            try:
                result = run_query(
                    wq.text,
                    transport,
                    cfg.dataset,
                    mode=cfg.mode,
                    timeout_s=cfg.timeout_s,
                )
                out.append(
                    QueryMetrics(
                        qid=wq.qid,
                        label=wq.label,
                        client=client_id,
                        nrs=result.log.nrs,
                        ntb=result.log.ntb,
                        qet_ms=result.qet_s * 1000.0,
                        qrt_ms=result.qrt_s * 1000.0,
                        results=len(result.rows),
                        timed_out=result.timed_out,
                    )
                )
            except TransportError as exc:
                log = exc.log
                out.append(
                    QueryMetrics(
                        qid=wq.qid,
                        label=wq.label,
                        client=client_id,
                        nrs=log.nrs if log else 0,
                        ntb=log.ntb if log else 0,
                        qet_ms=0.0,
                        qrt_ms=0.0,
                        results=0,
                        timed_out=False,
                        error=str(exc),
                    )
                )
    finally:
        transport.close()
    return out


def run_workload(cfg: WorkloadConfig) -> MetricsReport:
    """Drive the configured clients and aggregate their per-query metrics."""
    probe = HttpTransport(cfg.server_url)
    try:
        probe.meta(cfg.dataset)
    finally:
        probe.close()

    started = time.monotonic()
    if cfg.clients == 1:
        all_metrics = [_run_client(cfg, 0)]
    else:
        with ThreadPoolExecutor(max_workers=cfg.clients) as pool:
            futures = [pool.submit(_run_client, cfg, i) for i in range(cfg.clients)]
            all_metrics = [f.result() for f in futures]
    wall_s = time.monotonic() - started

    per_query = [m for worker in all_metrics for m in worker]
    completed = [m for m in per_query if not m.timed_out and m.error is None]
    executed = [m for m in per_query if m.error is None]
    minutes = wall_s / 60.0 if wall_s > 0 else float("inf")

    def mean(values: list[float]) -> float:
        return statistics.fmean(values) if values else 0.0

    aggregates = {
        "wallSeconds": wall_s,
        "queriesExecuted": len(executed),
        "queriesCompleted": len(completed),
        "timeouts": sum(1 for m in per_query if m.timed_out),
        "errors": sum(1 for m in per_query if m.error is not None),
        "throughputPerMin": len(executed) / minutes if minutes else 0.0,
        "totalNrs": sum(m.nrs for m in executed),
        "totalNtb": sum(m.ntb for m in executed),
        "meanNrs": mean([m.nrs for m in executed]),
        "meanNtb": mean([m.ntb for m in executed]),
        "meanQetMs": mean([m.qet_ms for m in completed]),
        "meanQrtMs": mean([m.qrt_ms for m in completed]),
    }
    config = {
        "mode": cfg.mode,
        "clients": cfg.clients,
        "queries": len(cfg.queries),
        "dataset": cfg.dataset,
        "server": cfg.server_url,
        "timeoutSeconds": cfg.timeout_s,
        "label": cfg.label,
        "seed": cfg.seed,
    }
    return MetricsReport(config=config, per_query=per_query, aggregates=aggregates)


def report_to_json(report: MetricsReport) -> dict:
    return {
        "note": report.note,
        "config": report.config,
        "perQuery": [
            {
                "qid": m.qid,
                "label": m.label,
                "client": m.client,
                "nrs": m.nrs,
                "ntb": m.ntb,
                "qetMs": round(m.qet_ms, 3),
                "qrtMs": round(m.qrt_ms, 3),
                "results": m.results,
                "timedOut": m.timed_out,
                "error": m.error,
            }
            for m in report.per_query
        ],
        "aggregates": report.aggregates,
    }


def write_report(report: MetricsReport, json_path: str | Path, tsv_path: str | Path | None = None) -> None:
    json_path = Path(json_path)
    json_path.write_text(json.dumps(report_to_json(report), indent=2) + "\n", encoding="utf-8")
    if tsv_path is None:
        tsv_path = json_path.with_suffix(".tsv")
    lines = ["qid\tlabel\tclient\tnrs\tntb\tqet_ms\tqrt_ms\tresults\ttimed_out\terror"]
    for m in report.per_query:
        lines.append(
            f"{m.qid}\t{m.label}\t{m.client}\t{m.nrs}\t{m.ntb}\t"
            f"{m.qet_ms:.3f}\t{m.qrt_ms:.3f}\t{m.results}\t"
            f"{int(m.timed_out)}\t{m.error or ''}"
        )
    lines.append("")
    for key, value in report.aggregates.items():
        lines.append(f"# {key}\t{value}")
    Path(tsv_path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def summary_table(report: MetricsReport) -> str:
    agg = report.aggregates
    rows = [
        ("mode", report.config["mode"]),
        ("clients", report.config["clients"]),
        ("queries executed", agg["queriesExecuted"]),
        ("completed", agg["queriesCompleted"]),
        ("timeouts", agg["timeouts"]),
        ("errors", agg["errors"]),
        ("throughput (q/min)", f"{agg['throughputPerMin']:.2f}"),
        ("mean NRS", f"{agg['meanNrs']:.2f}"),
        ("mean NTB (bytes)", f"{agg['meanNtb']:.1f}"),
        ("mean QET (ms)", f"{agg['meanQetMs']:.1f}"),
        ("mean QRT (ms)", f"{agg['meanQrtMs']:.1f}"),
    ]
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)
