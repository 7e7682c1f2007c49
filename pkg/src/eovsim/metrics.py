"""Run counters, latency summaries, derived ratios, and report emission.

Reports are byte-deterministic: stable column order, floats at 6 significant
digits, no wall-clock timestamps anywhere.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

__all__ = [
    "RunCounters", "LatencySummary", "ThroughputSummary",
    "success_ratio", "time_ratio", "e2e_latency",
    "fmt", "summary_columns", "summary_row", "emit_report",
]


@dataclass
class RunCounters:
    created: int = 0
    endorsed: int = 0
    dropped: int = 0
    dropped_capacity: int = 0
    dropped_quorum: int = 0
    dropped_horizon: int = 0
    committed_valid: int = 0
    committed_invalid_mvcc: int = 0
    in_flight_at_horizon: int = 0

    def check(self) -> None:
        if self.created != self.endorsed + self.dropped:
            raise AssertionError(
                f"conservation violated: created {self.created} != "
                f"endorsed {self.endorsed} + dropped {self.dropped}")
        if self.dropped != self.dropped_capacity + self.dropped_quorum + self.dropped_horizon:
            raise AssertionError("drop sub-labels do not add up")
        if self.endorsed != (self.committed_valid + self.committed_invalid_mvcc
                             + self.in_flight_at_horizon):
            raise AssertionError(
                f"conservation violated: endorsed {self.endorsed} != "
                f"valid {self.committed_valid} + invalid {self.committed_invalid_mvcc} "
                f"+ in-flight {self.in_flight_at_horizon}")


def success_ratio(created: int, endorsed: int, invalid: int) -> float:
    """Fraction of submitted transactions that are endorsed and not
    invalidated at commit (transactions still in flight count as
    successful-pending)."""
    if created <= 0:
        raise ValueError("created must be > 0")
    return (endorsed - invalid) / created


def time_ratio(p1_mean: float, p2_mean: float) -> float:
    if p2_mean <= 0:
        raise ValueError("phase-2 mean must be > 0")
    return p1_mean / p2_mean


def e2e_latency(tx) -> float:
    """Client submission to first-peer (leader-perspective) commit."""
    if tx.committed_at < 0:
        raise ValueError(f"tx {tx.tx_id} is not committed")
    return tx.committed_at - tx.created_at


def _nearest_rank(sorted_values, pct: float) -> float:
    n = len(sorted_values)
    rank = math.ceil(pct / 100.0 * n)
    return sorted_values[max(rank, 1) - 1]


@dataclass(frozen=True)
class LatencySummary:
    stage: str
    count: int
    mean: float
    std: float
    p50: float
    p95: float
    p99: float

    @classmethod
    def from_samples(cls, stage: str, samples) -> "LatencySummary | None":
        n = len(samples)
        if n == 0:
            return None
        mean = sum(samples) / n
        var = sum((s - mean) ** 2 for s in samples) / n
        ordered = sorted(samples)
        return cls(stage, n, mean, math.sqrt(var),
                   _nearest_rank(ordered, 50), _nearest_rank(ordered, 95),
                   _nearest_rank(ordered, 99))


@dataclass(frozen=True)
class ThroughputSummary:
    e2e_tps: float = 0.0
    commit_tps: float = 0.0
    endorsement_tps: float = 0.0
    time_ratio: float = 0.0
    performance_ratio: float = 0.0  # populated when a serial/pipelined pair is compared


def fmt(x) -> str:
    """Stable scalar formatting: ints verbatim, floats at 6 significant digits."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if x != x:
            return "nan"
        return f"{x:.6g}"
    return str(x)


_STAGES = ("endorse_total", "quorum_wait", "block_creation",
           "phase1", "phase2", "commit_total", "e2e")

_COUNTER_COLS = ("created", "endorsed", "dropped", "dropped_capacity",
                 "dropped_quorum", "dropped_horizon", "committed_valid",
                 "committed_invalid_mvcc", "in_flight_at_horizon")


def summary_columns() -> list[str]:
    cols = ["config_hash", "seed", "status", "leader_kind", "leader_tau",
            "dissem_m", "dissem_r", "dissem_relaxed", "commit_mode",
            "cut_kind", "block_size", "cut_timeout", "dependency_prob",
            "peers", "vscc_core_scale", "waiting_enabled"]
    cols += list(_COUNTER_COLS)
    cols += ["success_ratio", "e2e_tps", "commit_tps", "endorsement_tps",
             "time_ratio", "eligible_multi_fraction", "makespan", "last_commit_at",
             "blocks", "error"]
    for stage in _STAGES:
        for stat in ("mean", "std", "p50", "p95", "p99", "count"):
            cols.append(f"{stage}_{stat}")
    return cols


def summary_row(result) -> dict:
    """Flatten one RunResult into the stable summary schema."""
    cfg = result.config
    c = result.counters
    row = {
        "config_hash": result.config_hash,
        "seed": cfg.seed,
        "status": result.status,
        "leader_kind": cfg.leader.kind,
        "leader_tau": cfg.leader.tau,
        "dissem_m": cfg.dissemination.max_peer_count,
        "dissem_r": cfg.dissemination.required_peer_count,
        "dissem_relaxed": cfg.dissemination.relaxed,
        "commit_mode": cfg.commit_mode,
        "cut_kind": cfg.cut_rule.kind,
        "block_size": cfg.cut_rule.block_size,
        "cut_timeout": cfg.cut_rule.timeout,
        "dependency_prob": cfg.workload.dependency_prob,
        "peers": cfg.peers.count,
        "vscc_core_scale": cfg.commit_model.vscc_core_scale,
        "waiting_enabled": cfg.waiting.enabled,
        "success_ratio": (success_ratio(c.created, c.endorsed, c.committed_invalid_mvcc)
                          if c.created else 0.0),
        "e2e_tps": result.throughput.e2e_tps,
        "commit_tps": result.throughput.commit_tps,
        "endorsement_tps": result.throughput.endorsement_tps,
        "time_ratio": result.throughput.time_ratio,
        "eligible_multi_fraction": result.eligible_multi_fraction,
        "makespan": result.makespan,
        "last_commit_at": result.last_commit_at,
        "blocks": result.n_blocks,
        "error": result.error or "",
    }
    for col in _COUNTER_COLS:
        row[col] = getattr(c, col)
    for stage in _STAGES:
        summ = result.summaries.get(stage)
        for stat in ("mean", "std", "p50", "p95", "p99"):
            row[f"{stage}_{stat}"] = getattr(summ, stat) if summ else 0.0
        row[f"{stage}_count"] = summ.count if summ else 0
    return row


def render_summary_csv(rows) -> str:
    cols = summary_columns()
    lines = [",".join(cols)]
    for row in rows:
        lines.append(",".join(fmt(row.get(col, "")) for col in cols))
    return "\n".join(lines) + "\n"


def _tx_trace_row(tx) -> dict:
    return {
        "tx_id": tx.tx_id,
        "client": tx.client_id,
        "created_at": tx.created_at,
        "parent": tx.parent if tx.parent is not None else None,
        "endorser": tx.endorser,
        "endorse_start": tx.endorse_start,
        "endorse_end": tx.endorse_end,
        "quorum_wait": tx.quorum_wait,
        "retries_used": tx.retries_used,
        "disseminated_to": list(tx.disseminated_to) if tx.disseminated_to else [],
        "ordered_at": tx.ordered_at,
        "block_num": tx.block_num,
        "block_pos": tx.block_pos,
        "committed_at": tx.committed_at,
        "status": tx.status,
        "drop_reason": tx.drop_reason,
    }


def _block_trace_row(block, timings) -> dict:
    return {
        "block_num": block.block_num,
        "size": block.size,
        "first_enqueued_at": block.first_enqueued_at,
        "cut_at": block.cut_at,
        "creation_time": block.creation_time,
        "first_commit_at": block.first_commit_at,
        "peers": {
            str(t.peer_id): {"p1_start": t.p1_start, "p1_end": t.p1_end,
                             "p2_start": t.p2_start, "p2_end": t.p2_end}
            for t in timings
        },
    }


def _round6(obj):
    if isinstance(obj, float):
        return float(f"{obj:.6g}")
    if isinstance(obj, dict):
        return {k: _round6(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_round6(v) for v in obj]
    return obj


def _jsonl(rows) -> str:
    return "".join(json.dumps(_round6(r), sort_keys=True, separators=(",", ":")) + "\n"
                   for r in rows)


def render_report(result) -> dict:
    """All report files as {name: text}, exactly as emit_report writes them."""
    files = {
        "summary.csv": render_summary_csv([summary_row(result)]),
        "manifest.json": json.dumps({
            "config_hash": result.config_hash,
            "seed": result.config.seed,
            "tool": "eovsim",
            "version": result.version,
        }, sort_keys=True, indent=2) + "\n",
    }
    if result.tx_trace is not None:
        files["transactions.jsonl"] = _jsonl(_tx_trace_row(tx) for tx in result.tx_trace)
        files["blocks.jsonl"] = _jsonl(
            _block_trace_row(b, ts) for b, ts in result.block_trace)
    if result.config.waiting.enabled:
        rows = [{"at": e.at, "kind": e.kind, "leader": e.leader,
                 "lagger": e.lagger, "gap": e.gap} for e in result.wait_events]
        files["wait_events.jsonl"] = _jsonl(rows)
    return files


def emit_report(result, out_dir) -> list[Path]:
    """Write summary.csv, manifest.json, and (if collected) the traces."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create report directory {out}: {exc}") from exc
    written = []
    for name, text in render_report(result).items():
        path = out / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written
