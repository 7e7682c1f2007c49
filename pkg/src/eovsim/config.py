"""Scenario configuration: typed schema, JSON load/emit, validation, hashing.

The on-disk format is JSON. Any numeric field may be written with an `_ms`
suffix (milliseconds); it is converted to seconds and stored under the
unsuffixed name at load time. Unknown fields are rejected with their path so
typos fail loudly.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .kernel import DistributionSpec

__all__ = [
    "ConfigError",
    "WorkloadConfig",
    "PeerGroupConfig",
    "DisseminationStrategy",
    "LeaderPolicy",
    "BlockCutRule",
    "CommitLatencyModel",
    "WaitingPolicy",
    "ScenarioConfig",
    "load_config",
    "loads_config",
    "config_to_dict",
    "emit_config",
    "config_hash",
]

ARRIVAL_PROCESSES = ("deterministic", "poisson", "pool")
LEADER_KINDS = ("max_ht", "soft_max_ht", "ranked_list", "all")
CUT_KINDS = ("size_with_timeout", "dynamic_timeout")
COMMIT_MODES = ("serial", "pipelined")


class ConfigError(Exception):
    """Raised with every field-level problem found in a config."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class WorkloadConfig:
    num_clients: int = 5
    rate_per_client: float = 250.0  # transactions/second, ignored in pool mode
    duration: float = 300.0         # seconds of arrivals, ignored in pool mode
    dependency_prob: float = 0.0
    arrival_process: str = "deterministic"
    pool_size: int = 0              # pool mode: transactions available at t=0


@dataclass(frozen=True)
class PeerGroupConfig:
    count: int = 5
    commit_scales: tuple[float, ...] = ()  # empty = all 1.0
    gateway_buffer: int = 1000             # B: bounded queue per peer
    endorse_concurrency: int = 1000        # C: concurrent endorsement slots

    def scale_for(self, peer_id: int) -> float:
        return self.commit_scales[peer_id] if self.commit_scales else 1.0


@dataclass(frozen=True)
class DisseminationStrategy:
    max_peer_count: int = 1       # m
    required_peer_count: int = 1  # r
    relaxed: bool = False         # the 1* variant; implies r == 1
    ack_timeout: float = 1.0
    max_retries: int = 1


@dataclass(frozen=True)
class LeaderPolicy:
    kind: str = "ranked_list"
    tau: int = 0  # height window, soft_max_ht only


@dataclass(frozen=True)
class BlockCutRule:
    kind: str = "size_with_timeout"
    block_size: int = 4000
    timeout: float = 10.0


@dataclass(frozen=True)
class CommitLatencyModel:
    vscc: DistributionSpec = DistributionSpec.constant(0.0)
    pvt_fetch_local: DistributionSpec = DistributionSpec.constant(0.0)
    pvt_fetch_remote: DistributionSpec = DistributionSpec.constant(0.0)
    mvcc: DistributionSpec = DistributionSpec.constant(0.0)
    block_store: DistributionSpec = DistributionSpec.constant(0.0)
    statedb: DistributionSpec = DistributionSpec.constant(0.0)
    vscc_core_scale: float = 1.0


@dataclass(frozen=True)
class WaitingPolicy:
    enabled: bool = False
    tau: int = 5
    ceiling: int = 15
    boosted_mean: float = 0.0
    baseline_means: tuple[float, ...] = ()


@dataclass(frozen=True)
class EndorseLatencyModel:
    execute: DistributionSpec = DistributionSpec.constant(0.0)
    overhead: DistributionSpec = DistributionSpec.constant(0.0)
    ack: DistributionSpec = DistributionSpec.constant(0.0)


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int = 1
    horizon: float = 10_000.0
    out_dir: str = "out"
    workload: WorkloadConfig = field(default_factory=WorkloadConfig)
    peers: PeerGroupConfig = field(default_factory=PeerGroupConfig)
    dissemination: DisseminationStrategy = field(default_factory=DisseminationStrategy)
    leader: LeaderPolicy = field(default_factory=LeaderPolicy)
    cut_rule: BlockCutRule = field(default_factory=BlockCutRule)
    commit_mode: str = "serial"
    endorse_model: EndorseLatencyModel = field(default_factory=EndorseLatencyModel)
    commit_model: CommitLatencyModel = field(default_factory=CommitLatencyModel)
    ordering_overhead: float = 0.0  # fixed delay added to each block delivery
    waiting: WaitingPolicy = field(default_factory=WaitingPolicy)
    emit_traces: bool = True

    def with_seed(self, seed: int) -> "ScenarioConfig":
        return replace(self, seed=seed)


# ---------------------------------------------------------------------------
# JSON <-> dataclass plumbing

_DIST_FIELDS = {
    "family": str,
    "value": float,
    "mean": float,
    "std": float,
    "samples": list,
    "path": str,
    "scale": float,
    "per_tx": float,
}


def _normalize_ms(obj, path, errors):
    """Convert any *_ms numeric leaf to seconds under the unsuffixed key."""
    if isinstance(obj, dict):
        out = {}
        for key, val in obj.items():
            if key.endswith("_ms") and isinstance(val, (int, float)) and not isinstance(val, bool):
                base = key[: -len("_ms")]
                if base in obj:
                    errors.append(f"{path}{key}: both {base} and {key} given")
                    continue
                out[base] = val / 1000.0
            else:
                out[key] = _normalize_ms(val, f"{path}{key}.", errors)
        return out
    if isinstance(obj, list):
        return [_normalize_ms(v, path, errors) for v in obj]
    return obj


def _check_unknown(given: dict, known, path, errors):
    for key in given:
        if key not in known:
            errors.append(f"{path}{key}: unknown field")


def _dist_from_dict(d, path, errors, base_dir=None) -> DistributionSpec:
    if not isinstance(d, dict):
        errors.append(f"{path}: expected an object")
        return DistributionSpec.constant(0.0)
    _check_unknown(d, _DIST_FIELDS, path + ".", errors)
    kwargs = {k: d[k] for k in ("value", "mean", "std", "scale", "per_tx") if k in d}
    family = d.get("family", "constant")
    samples = d.get("samples")
    if "path" in d:
        p = Path(d["path"])
        if base_dir is not None and not p.is_absolute():
            p = Path(base_dir) / p
        try:
            samples = [float(line) for line in p.read_text().split()]
        except OSError as exc:
            errors.append(f"{path}.path: cannot read {p}: {exc}")
            return DistributionSpec.constant(0.0)
    try:
        if family == "empirical":
            extra = {k: v for k, v in kwargs.items() if k in ("scale", "per_tx")}
            return DistributionSpec.empirical(samples or (), **extra)
        return DistributionSpec(family=family, samples=(), **kwargs)
    except (ValueError, TypeError) as exc:
        errors.append(f"{path}: {exc}")
        return DistributionSpec.constant(0.0)


def _dist_to_dict(spec: DistributionSpec) -> dict:
    d: dict = {"family": spec.family}
    if spec.family == "constant":
        d["value"] = spec.value
    elif spec.family == "exponential":
        d["mean"] = spec.mean
    elif spec.family == "normal":
        d["mean"] = spec.mean
        d["std"] = spec.std
    else:
        d["samples"] = list(spec.samples)
    if spec.scale != 1.0:
        d["scale"] = spec.scale
    if spec.per_tx != 0.0:
        d["per_tx"] = spec.per_tx
    return d


_SECTION_FIELDS = {
    "workload": ("num_clients", "rate_per_client", "duration", "dependency_prob",
                 "arrival_process", "pool_size"),
    "peers": ("count", "commit_scales", "gateway_buffer", "endorse_concurrency"),
    "dissemination": ("max_peer_count", "required_peer_count", "relaxed",
                      "ack_timeout", "max_retries"),
    "leader": ("kind", "tau"),
    "cut_rule": ("kind", "block_size", "timeout"),
    "waiting": ("enabled", "tau", "ceiling", "boosted_mean", "baseline_means"),
    "endorse_model": ("execute", "overhead", "ack"),
    "commit_model": ("vscc", "pvt_fetch_local", "pvt_fetch_remote", "mvcc",
                     "block_store", "statedb", "vscc_core_scale"),
}

_TOP_FIELDS = ("seed", "horizon", "out_dir", "workload", "peers", "dissemination",
               "leader", "cut_rule", "commit_mode", "endorse_model", "commit_model",
               "ordering_overhead", "waiting", "emit_traces")


def _build_section(cls, raw, name, errors, dist_fields=(), base_dir=None, tuple_fields=()):
    if raw is None:
        return cls()
    if not isinstance(raw, dict):
        errors.append(f"{name}: expected an object")
        return cls()
    _check_unknown(raw, _SECTION_FIELDS[name], f"{name}.", errors)
    kwargs = {}
    for key, val in raw.items():
        if key not in _SECTION_FIELDS[name]:
            continue
        if key in dist_fields:
            kwargs[key] = _dist_from_dict(val, f"{name}.{key}", errors, base_dir)
        elif key in tuple_fields:
            if not isinstance(val, list):
                errors.append(f"{name}.{key}: expected a list")
                continue
            kwargs[key] = tuple(val)
        else:
            kwargs[key] = val
    try:
        return cls(**kwargs)
    except TypeError as exc:
        errors.append(f"{name}: {exc}")
        return cls()


def _from_dict(raw: dict, base_dir=None) -> ScenarioConfig:
    errors: list[str] = []
    raw = _normalize_ms(raw, "", errors)
    _check_unknown(raw, _TOP_FIELDS, "", errors)

    workload = _build_section(WorkloadConfig, raw.get("workload"), "workload", errors)
    peers = _build_section(PeerGroupConfig, raw.get("peers"), "peers", errors,
                           tuple_fields=("commit_scales",))
    dissem = _build_section(DisseminationStrategy, raw.get("dissemination"), "dissemination", errors)
    leader = _build_section(LeaderPolicy, raw.get("leader"), "leader", errors)
    cut = _build_section(BlockCutRule, raw.get("cut_rule"), "cut_rule", errors)
    waiting = _build_section(WaitingPolicy, raw.get("waiting"), "waiting", errors,
                             tuple_fields=("baseline_means",))
    endorse = _build_section(EndorseLatencyModel, raw.get("endorse_model"), "endorse_model",
                             errors, dist_fields=("execute", "overhead", "ack"), base_dir=base_dir)
    commit = _build_section(CommitLatencyModel, raw.get("commit_model"), "commit_model", errors,
                            dist_fields=("vscc", "pvt_fetch_local", "pvt_fetch_remote",
                                         "mvcc", "block_store", "statedb"),
                            base_dir=base_dir)

    cfg = ScenarioConfig(
        seed=raw.get("seed", 1),
        horizon=raw.get("horizon", 10_000.0),
        out_dir=raw.get("out_dir", "out"),
        workload=workload,
        peers=peers,
        dissemination=dissem,
        leader=leader,
        cut_rule=cut,
        commit_mode=raw.get("commit_mode", "serial"),
        endorse_model=endorse,
        commit_model=commit,
        ordering_overhead=raw.get("ordering_overhead", 0.0),
        waiting=waiting,
        emit_traces=raw.get("emit_traces", True),
    )
    errors.extend(validate(cfg))
    if errors:
        raise ConfigError(errors)
    return cfg


def validate(cfg: ScenarioConfig) -> list[str]:
    """All invariant violations, each tagged with its field path."""
    e: list[str] = []
    w, p, d = cfg.workload, cfg.peers, cfg.dissemination

    if w.arrival_process not in ARRIVAL_PROCESSES:
        e.append(f"workload.arrival_process: {w.arrival_process!r} not in {ARRIVAL_PROCESSES}")
    if w.arrival_process == "pool":
        if w.pool_size < 1:
            e.append("workload.pool_size: must be >= 1 in pool mode")
    else:
        if w.rate_per_client <= 0:
            e.append("workload.rate_per_client: must be > 0")
        if w.duration <= 0:
            e.append("workload.duration: must be > 0")
        if w.num_clients < 1:
            e.append("workload.num_clients: must be >= 1")
    if not 0.0 <= w.dependency_prob <= 1.0:
        e.append("workload.dependency_prob: must be in [0, 1]")

    if p.count < 2:
        e.append("peers.count: must be >= 2")
    if p.commit_scales and len(p.commit_scales) != p.count:
        e.append("peers.commit_scales: length must equal peers.count")
    if p.commit_scales and any(s <= 0 for s in p.commit_scales):
        e.append("peers.commit_scales: must be positive")
    if p.gateway_buffer < 0:
        e.append("peers.gateway_buffer: must be >= 0")
    if p.endorse_concurrency < 1:
        e.append("peers.endorse_concurrency: must be >= 1")

    if not 1 <= d.max_peer_count <= p.count - 1:
        e.append("dissemination.max_peer_count: need 1 <= m <= n-1")
    if not 1 <= d.required_peer_count <= d.max_peer_count:
        e.append("dissemination.required_peer_count: need 1 <= r <= m")
    if d.relaxed and d.required_peer_count != 1:
        e.append("dissemination.required_peer_count: relaxed (1*) requires r == 1")
    if d.ack_timeout <= 0:
        e.append("dissemination.ack_timeout: must be > 0")
    if d.max_retries < 0:
        e.append("dissemination.max_retries: must be >= 0")

    if cfg.leader.kind not in LEADER_KINDS:
        e.append(f"leader.kind: {cfg.leader.kind!r} not in {LEADER_KINDS}")
    if cfg.leader.tau < 0:
        e.append("leader.tau: must be >= 0")

    if cfg.cut_rule.kind not in CUT_KINDS:
        e.append(f"cut_rule.kind: {cfg.cut_rule.kind!r} not in {CUT_KINDS}")
    if cfg.cut_rule.kind == "size_with_timeout" and cfg.cut_rule.block_size < 1:
        e.append("cut_rule.block_size: must be >= 1")
    if cfg.cut_rule.timeout <= 0:
        e.append("cut_rule.timeout: must be > 0")

    if cfg.commit_mode not in COMMIT_MODES:
        e.append(f"commit_mode: {cfg.commit_mode!r} not in {COMMIT_MODES}")
    if cfg.commit_model.vscc_core_scale <= 0:
        e.append("commit_model.vscc_core_scale: must be > 0")
    if cfg.ordering_overhead < 0:
        e.append("ordering_overhead: must be >= 0")
    if cfg.horizon <= 0:
        e.append("horizon: must be > 0")

    wt = cfg.waiting
    if wt.enabled:
        if not 0 < wt.tau < wt.ceiling:
            e.append("waiting: need 0 < tau < ceiling")
        if len(wt.baseline_means) != p.count:
            e.append("waiting.baseline_means: length must equal peers.count")
        elif wt.boosted_mean >= max(wt.baseline_means):
            e.append("waiting.boosted_mean: must be below the lagger baseline mean")
        elif wt.boosted_mean <= 0:
            e.append("waiting.boosted_mean: must be > 0")
    return e


def loads_config(text: str, base_dir=None) -> ScenarioConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"not valid JSON: {exc}"]) from exc
    if not isinstance(raw, dict):
        raise ConfigError(["top level must be a JSON object"])
    return _from_dict(raw, base_dir=base_dir)


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError([f"cannot read {path}: {exc}"]) from exc
    return loads_config(text, base_dir=path.parent)


def config_to_dict(cfg: ScenarioConfig) -> dict:
    return {
        "seed": cfg.seed,
        "horizon": cfg.horizon,
        "out_dir": cfg.out_dir,
        "workload": {
            "num_clients": cfg.workload.num_clients,
            "rate_per_client": cfg.workload.rate_per_client,
            "duration": cfg.workload.duration,
            "dependency_prob": cfg.workload.dependency_prob,
            "arrival_process": cfg.workload.arrival_process,
            "pool_size": cfg.workload.pool_size,
        },
        "peers": {
            "count": cfg.peers.count,
            "commit_scales": list(cfg.peers.commit_scales),
            "gateway_buffer": cfg.peers.gateway_buffer,
            "endorse_concurrency": cfg.peers.endorse_concurrency,
        },
        "dissemination": {
            "max_peer_count": cfg.dissemination.max_peer_count,
            "required_peer_count": cfg.dissemination.required_peer_count,
            "relaxed": cfg.dissemination.relaxed,
            "ack_timeout": cfg.dissemination.ack_timeout,
            "max_retries": cfg.dissemination.max_retries,
        },
        "leader": {"kind": cfg.leader.kind, "tau": cfg.leader.tau},
        "cut_rule": {
            "kind": cfg.cut_rule.kind,
            "block_size": cfg.cut_rule.block_size,
            "timeout": cfg.cut_rule.timeout,
        },
        "commit_mode": cfg.commit_mode,
        "endorse_model": {
            "execute": _dist_to_dict(cfg.endorse_model.execute),
            "overhead": _dist_to_dict(cfg.endorse_model.overhead),
            "ack": _dist_to_dict(cfg.endorse_model.ack),
        },
        "commit_model": {
            "vscc": _dist_to_dict(cfg.commit_model.vscc),
            "pvt_fetch_local": _dist_to_dict(cfg.commit_model.pvt_fetch_local),
            "pvt_fetch_remote": _dist_to_dict(cfg.commit_model.pvt_fetch_remote),
            "mvcc": _dist_to_dict(cfg.commit_model.mvcc),
            "block_store": _dist_to_dict(cfg.commit_model.block_store),
            "statedb": _dist_to_dict(cfg.commit_model.statedb),
            "vscc_core_scale": cfg.commit_model.vscc_core_scale,
        },
        "ordering_overhead": cfg.ordering_overhead,
        "waiting": {
            "enabled": cfg.waiting.enabled,
            "tau": cfg.waiting.tau,
            "ceiling": cfg.waiting.ceiling,
            "boosted_mean": cfg.waiting.boosted_mean,
            "baseline_means": list(cfg.waiting.baseline_means),
        },
        "emit_traces": cfg.emit_traces,
    }


def emit_config(cfg: ScenarioConfig, path=None) -> str:
    text = json.dumps(config_to_dict(cfg), indent=2, sort_keys=True) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def config_hash(cfg: ScenarioConfig) -> str:
    canon = json.dumps(config_to_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]


def set_by_path(cfg: ScenarioConfig, dotted: str, value) -> ScenarioConfig:
    """Return a copy of cfg with the dotted config path replaced (sweep grids)."""
    d = config_to_dict(cfg)
    parts = dotted.split(".")
    node = d
    for part in parts[:-1]:
        if not isinstance(node, dict) or part not in node:
            raise ConfigError([f"{dotted}: no such config path"])
        node = node[part]
    if not isinstance(node, dict) or parts[-1] not in node:
        raise ConfigError([f"{dotted}: no such config path"])
    node[parts[-1]] = value
    return _from_dict(d)
