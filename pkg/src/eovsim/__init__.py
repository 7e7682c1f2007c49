"""eovsim: a deterministic discrete-event simulator of the permissioned-
blockchain transaction lifecycle (endorse, order, commit).

Models private-data dissemination quorums, leader-selection policies, block
cutting, a two-phase (serial or pipelined) commit engine with an MVCC
dependency-conflict model, and a strategic-waiting coordination controller,
under calibrated per-stage latency distributions.
"""

__version__ = "0.1.0"

from .kernel import (
    DistributionSpec,
    RngStream,
    SchedulingError,
    SimKernel,
    SimulationError,
    SimulationIntegrityError,
    StreamRegistry,
)
from .config import (
    BlockCutRule,
    CommitLatencyModel,
    ConfigError,
    DisseminationStrategy,
    EndorseLatencyModel,
    LeaderPolicy,
    PeerGroupConfig,
    ScenarioConfig,
    WaitingPolicy,
    WorkloadConfig,
    config_hash,
    emit_config,
    load_config,
    loads_config,
)
from .commit import assign_validity, bench_commit, mvcc_validate, steady_state_tps
from .coordination import WaitEvent, evaluate_wait, resume_check
from .endorsement import PeerState, eligible_endorsers, quorum_satisfied
from .metrics import (
    LatencySummary,
    RunCounters,
    ThroughputSummary,
    e2e_latency,
    emit_report,
    success_ratio,
    time_ratio,
)
from .simulate import RunResult, Simulation, run_scenario
from .workload import InFlightPool, Transaction, TxStatus, assign_dependency
from . import presets
from .sweep import run_sweep

__all__ = [
    "__version__",
    "DistributionSpec", "RngStream", "SimKernel", "StreamRegistry",
    "SimulationError", "SchedulingError", "SimulationIntegrityError",
    "ScenarioConfig", "WorkloadConfig", "PeerGroupConfig", "DisseminationStrategy",
    "LeaderPolicy", "BlockCutRule", "CommitLatencyModel", "EndorseLatencyModel",
    "WaitingPolicy", "ConfigError", "load_config", "loads_config", "emit_config",
    "config_hash",
    "steady_state_tps", "bench_commit", "mvcc_validate", "assign_validity",
    "WaitEvent", "evaluate_wait", "resume_check",
    "PeerState", "eligible_endorsers", "quorum_satisfied",
    "RunCounters", "LatencySummary", "ThroughputSummary",
    "success_ratio", "time_ratio", "e2e_latency", "emit_report",
    "Simulation", "RunResult", "run_scenario",
    "Transaction", "TxStatus", "InFlightPool", "assign_dependency",
    "presets", "run_sweep",
]
