"""Per-peer five-stage commit engine with serial and pipelined scheduling.

Phase 1 is VSCC validation plus private-data fetch (local when the peer holds
every transaction's private data at phase start, remote otherwise); phase 2
is the MVCC check, block-store update, and state-database write, which must
run in strict block order. Pipelining overlaps phase 1 of block i+1 with
phase 2 of block i; phase 2 of i+1 still waits for phase 2 of i.

Transaction validity is a pure function of final ledger order: a dependent
transaction is invalid unless its parent committed valid at a strictly
earlier ledger position (earlier block, or earlier slot in the same block).
A parent that was dropped before ordering can never conflict, so its
dependents pass vacuously.
"""

from __future__ import annotations

from .kernel import EventKind, SimulationIntegrityError
from .workload import TxStatus

__all__ = ["PhaseTiming", "CommitEngine", "steady_state_tps", "bench_commit",
           "mvcc_validate", "assign_validity"]


class PhaseTiming:
    __slots__ = ("block_num", "peer_id", "p1_start", "p1_end", "p2_start", "p2_end")

    def __init__(self, block_num: int, peer_id: int):
        self.block_num = block_num
        self.peer_id = peer_id
        self.p1_start = self.p1_end = -1.0
        self.p2_start = self.p2_end = -1.0

    @property
    def p1_duration(self) -> float:
        return self.p1_end - self.p1_start

    @property
    def p2_duration(self) -> float:
        return self.p2_end - self.p2_start

    @property
    def time_ratio(self) -> float:
        return self.p1_duration / self.p2_duration


def steady_state_tps(p1: float, p2: float, block_size: int, mode: str) -> float:
    """Closed-form saturated commit throughput (the pipelining oracle)."""
    if p1 <= 0 and p2 <= 0:
        raise ValueError("phase durations must be positive")
    if mode == "serial":
        return block_size / (p1 + p2)
    if mode == "pipelined":
        return block_size / max(p1, p2)
    raise ValueError(f"unknown commit mode {mode!r}")


class CommitEngine:
    """One peer's commit pipeline inside the shared kernel loop."""

    def __init__(self, sim, peer, model, mode: str):
        self.sim = sim
        self.peer = peer
        self.model = model
        self.mode = mode
        pid = peer.peer_id
        self._vscc = sim.streams.stream(f"peer{pid}.vscc")
        self._fetch = sim.streams.stream(f"peer{pid}.fetch")
        self._mvcc = sim.streams.stream(f"peer{pid}.mvcc")
        self._store = sim.streams.stream(f"peer{pid}.block_store")
        self._statedb = sim.streams.stream(f"peer{pid}.statedb")
        self.blocks = []            # delivered blocks, in order
        self.timings: list[PhaseTiming] = []
        self.p1_next = 0            # next block index to start phase 1
        self.p2_next = 0            # next block index to start phase 2
        self.p1_busy = False
        self.p2_busy = False
        self.p2_prev_end = 0.0

    def on_block_delivered(self, block) -> None:
        self.blocks.append(block)
        self.timings.append(PhaseTiming(block.block_num, self.peer.peer_id))
        self._maybe_start_p1()

    def _factor(self) -> float:
        return self.peer.commit_scale * self.peer.boost_factor

    def _maybe_start_p1(self) -> None:
        if self.p1_busy or self.p1_next >= len(self.blocks):
            return
        idx = self.p1_next
        if self.mode == "serial" and self.p2_next < idx:
            return  # strict discipline: previous block must fully commit first
        block = self.blocks[idx]
        size = block.size
        fetch_dist = (self.model.pvt_fetch_local if block.local_data[self.peer.peer_id]
                      else self.model.pvt_fetch_remote)
        dur = (self.model.vscc.sample(self._vscc, size) * self.model.vscc_core_scale
               + fetch_dist.sample(self._fetch, size)) * self._factor()
        self.p1_busy = True
        now = self.sim.kernel.now
        t = self.timings[idx]
        t.p1_start = now
        t.p1_end = now + dur
        self.sim.kernel.schedule(now + dur, EventKind.PHASE1_DONE, self._on_p1_done)

    def _on_p1_done(self) -> None:
        self.p1_busy = False
        self.p1_next += 1
        if self.mode == "pipelined":
            self._maybe_start_p1()
        self._maybe_start_p2()

    def _maybe_start_p2(self) -> None:
        if self.p2_busy or self.p2_next >= self.p1_next or self.peer.paused:
            return
        idx = self.p2_next
        block = self.blocks[idx]
        size = block.size
        dur = (self.model.mvcc.sample(self._mvcc, size)
               + self.model.block_store.sample(self._store, size)
               + self.model.statedb.sample(self._statedb, size)) * self._factor()
        now = self.sim.kernel.now
        if now < self.p2_prev_end - 1e-12:
            raise SimulationIntegrityError(
                f"peer {self.peer.peer_id}: phase 2 of block {block.block_num} "
                f"would start at {now} before previous phase 2 ended at {self.p2_prev_end}")
        self.p2_busy = True
        t = self.timings[idx]
        t.p2_start = now
        t.p2_end = now + dur
        self.sim.kernel.schedule(now + dur, EventKind.PHASE2_DONE,
                                 lambda: self._on_p2_done(idx))

    def _on_p2_done(self, idx: int) -> None:
        if idx != self.p2_next:
            raise SimulationIntegrityError(
                f"peer {self.peer.peer_id}: out-of-order phase 2 completion "
                f"(block index {idx}, expected {self.p2_next})")
        self.p2_busy = False
        self.p2_next += 1
        self.p2_prev_end = self.sim.kernel.now
        self.peer.height += 1
        self.sim.on_commit(self.peer, self.blocks[idx], self.timings[idx])
        self._maybe_start_p1()
        self._maybe_start_p2()

    def kick(self) -> None:
        """Re-check both phases (pause released, or external state changed)."""
        self._maybe_start_p1()
        self._maybe_start_p2()

    @property
    def committed(self) -> int:
        return self.p2_next


# ---------------------------------------------------------------------------
# Validity

def mvcc_validate(tx, committed: set, dropped: set = frozenset()) -> str:
    """Validity of one transaction at its commit instant.

    committed: ids of transactions committed at strictly earlier ledger
    positions (earlier block, or earlier slot of the same block); whether the
    parent itself passed MVCC does not matter, only that it settled first.
    dropped: ids that were dropped before ordering and so can never conflict.
    """
    if tx.parent is None or tx.parent in committed or tx.parent in dropped:
        return TxStatus.COMMITTED_VALID
    return TxStatus.COMMITTED_INVALID


def assign_validity(blocks, txs, parent_of=None) -> tuple[int, int]:
    """Walk the ledger in order and flag every ordered transaction.

    A dependent transaction is invalid iff its parent is still in flight at
    the dependent's commit: not dropped, and not ordered at a strictly
    earlier ledger position. Ledger position is (block_num, block_pos), so
    the check is a direct comparison.

    txs: all transactions indexed by tx_id. parent_of: optional override
    mapping tx_id -> parent id (-1 for none), used to evaluate alternative
    dependency assignments against the same ledger; statuses are left
    untouched in that case.

    Returns (valid_count, invalid_count).
    """
    n_valid = n_invalid = 0
    mutate = parent_of is None
    dropped = TxStatus.DROPPED
    for block in blocks:
        bnum = block.block_num
        for tx in block.txs:
            parent = tx.parent if mutate else parent_of[tx.tx_id]
            if parent is None or parent == -1:
                ok = True
            else:
                par = txs[parent]
                pb = par.block_num
                ok = ((pb != -1 and (pb < bnum or (pb == bnum and par.block_pos < tx.block_pos)))
                      or par.status == dropped)
            if ok:
                n_valid += 1
                if mutate:
                    tx.status = TxStatus.COMMITTED_VALID
            else:
                n_invalid += 1
                if mutate:
                    tx.status = TxStatus.COMMITTED_INVALID
    return n_valid, n_invalid


def bench_commit(p1_dist, p2_dist, block_size: int, mode: str, n_blocks: int,
                 seed: int = 1, warmup: int = 10):
    """Drive one real commit engine with a saturated queue of blocks.

    All blocks are delivered at t=0; throughput is measured over blocks
    (warmup, n_blocks]. With constant stage distributions this matches
    steady_state_tps exactly.
    """
    from .kernel import SimKernel, StreamRegistry
    from .config import CommitLatencyModel
    from .endorsement import PeerState

    class _StubSim:
        def __init__(self):
            self.kernel = SimKernel()
            self.streams = StreamRegistry(seed)
            self.commit_times = []

        def on_commit(self, peer, block, timing):
            self.commit_times.append(self.kernel.now)

    class _StubBlock:
        __slots__ = ("block_num", "size", "local_data")

        def __init__(self, num):
            self.block_num = num
            self.size = block_size
            self.local_data = [True]

    if not 0 <= warmup < n_blocks:
        raise ValueError("need 0 <= warmup < n_blocks")
    sim = _StubSim()
    model = CommitLatencyModel(vscc=p1_dist, mvcc=p2_dist)
    engine = CommitEngine(sim, PeerState(0), model, mode)
    for i in range(n_blocks):
        engine.on_block_delivered(_StubBlock(i + 1))
    sim.kernel.run_until()
    if engine.committed != n_blocks:
        raise SimulationIntegrityError("bench did not commit every block")
    t0 = sim.commit_times[warmup - 1] if warmup else 0.0
    elapsed = sim.commit_times[-1] - t0
    tps = (n_blocks - warmup) * block_size / elapsed
    timings = engine.timings
    p1_mean = sum(t.p1_duration for t in timings) / n_blocks
    p2_mean = sum(t.p2_duration for t in timings) / n_blocks
    return {"tps": tps, "p1_mean": p1_mean, "p2_mean": p2_mean,
            "time_ratio": p1_mean / p2_mean, "timings": timings}
