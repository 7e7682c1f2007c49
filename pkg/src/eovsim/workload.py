"""Client workload: transaction arrivals and inter-transaction dependencies.

Deterministic arrivals emit one transaction every 1/rate seconds per client
starting at t = 1/rate; poisson arrivals draw exponential gaps. Pool mode
(used by the two-peer coordination scenario) makes a fixed batch of
transactions available at t = 0 to be pulled by idle eligible endorsers.

A new transaction becomes dependent on a prior one with probability p; the
parent is drawn uniformly from the transactions that are still ahead of the
orderer (created, not dropped, not yet cut into a block). Validity against
the parent is settled later, from final ledger order.
"""

from __future__ import annotations

from .kernel import EventKind, RngStream

__all__ = ["TxStatus", "Transaction", "InFlightPool", "assign_dependency", "ArrivalSource"]


class TxStatus:
    CREATED = "created"
    BUFFERED = "buffered"
    EXECUTING = "executing"
    ENDORSED = "endorsed"
    DROPPED = "dropped"
    COMMITTED_VALID = "committed-valid"
    COMMITTED_INVALID = "committed-invalid-mvcc"


class Transaction:
    __slots__ = (
        "tx_id", "client_id", "created_at", "parent",
        "endorser", "endorse_start", "endorse_end", "quorum_wait", "retries_used",
        "disseminated_to", "ordered_at", "block_num", "block_pos",
        "committed_at", "status", "drop_reason",
    )

    def __init__(self, tx_id: int, client_id: int, created_at: float):
        self.tx_id = tx_id
        self.client_id = client_id
        self.created_at = created_at
        self.parent: int | None = None
        self.endorser: int | None = None
        self.endorse_start = -1.0
        self.endorse_end = -1.0
        self.quorum_wait = 0.0
        self.retries_used = 0
        self.disseminated_to: tuple[int, ...] | None = None
        self.ordered_at = -1.0
        self.block_num = -1
        self.block_pos = -1
        self.committed_at = -1.0
        self.status = TxStatus.CREATED
        self.drop_reason: str | None = None

    def __repr__(self):
        return f"Transaction({self.tx_id}, status={self.status})"


class InFlightPool:
    """Uniform-choice set of dependency candidates with O(1) add/remove."""

    __slots__ = ("_items", "_index")

    def __init__(self):
        self._items: list[int] = []
        self._index: dict[int, int] = {}

    def __len__(self):
        return len(self._items)

    def add(self, tx_id: int) -> None:
        self._index[tx_id] = len(self._items)
        self._items.append(tx_id)

    def discard(self, tx_id: int) -> None:
        i = self._index.pop(tx_id, None)
        if i is None:
            return
        last = self._items.pop()
        if i < len(self._items):
            self._items[i] = last
            self._index[last] = i

    def choose(self, stream: RngStream) -> int:
        return self._items[stream.randint(len(self._items))]


def assign_dependency(tx: Transaction, pool: InFlightPool, p: float, stream: RngStream) -> Transaction:
    """With probability p, make tx depend on a uniform member of the pool.

    Consumes exactly one bernoulli draw, plus one index draw when a parent is
    assigned, so dependency sampling never perturbs other streams.
    """
    if tx.parent is not None:
        raise ValueError(f"tx {tx.tx_id} already has a parent")
    if p > 0.0 and stream.uniform() < p and len(pool) > 0:
        tx.parent = pool.choose(stream)
    return tx


def dependency_stream_label(p: float) -> str:
    return f"workload.dependency[p={p!r}]"


class ArrivalSource:
    """Generates creation events and routes new transactions to endorsement.

    For rate-driven modes each client is a self-rescheduling chain of arrival
    events, so the pending-event count stays O(num_clients). Extra dependency
    probabilities may be evaluated alongside the primary one: each has its own
    RNG stream, so the assignments match what a standalone run at that p would
    draw.
    """

    def __init__(self, sim, workload_cfg, extra_probs=()):
        self.sim = sim
        self.cfg = workload_cfg
        self.pool = InFlightPool()
        self.txs: list[Transaction] = []
        self._active_clients = 0
        self.pending_pool: list[Transaction] = []  # pool mode backlog (FIFO)
        self._pool_cursor = 0
        probs = [workload_cfg.dependency_prob]
        probs += [p for p in extra_probs if p != workload_cfg.dependency_prob]
        self._probs = probs
        self._dep_streams = {p: sim.streams.stream(dependency_stream_label(p)) for p in probs}
        # extra_parents[p][tx_id] = parent tx_id or -1
        self.extra_parents: dict[float, list[int]] = {p: [] for p in probs[1:]}

    @property
    def dependency_probs(self) -> list[float]:
        return self._probs

    def start(self) -> None:
        cfg = self.cfg
        if cfg.arrival_process == "pool":
            for _ in range(cfg.pool_size):
                tx = self._create(client_id=0, at=0.0)
                self.pending_pool.append(tx)
            self._active_clients = 0
            return
        self._active_clients = cfg.num_clients
        for client in range(cfg.num_clients):
            self._schedule_next(client, emitted=0)

    # -- rate-driven arrivals ------------------------------------------------

    def _schedule_next(self, client: int, emitted: int) -> None:
        cfg = self.cfg
        if cfg.arrival_process == "deterministic":
            # exactly rate*duration per client, at k/rate for k = 1..n
            if emitted >= int(round(cfg.rate_per_client * cfg.duration)):
                self._finish_client()
                return
            at = (emitted + 1) / cfg.rate_per_client
        else:
            gap_stream = self.sim.streams.stream(f"workload.arrivals.c{client}")
            base = self.sim.kernel.now if emitted else 0.0
            at = base + gap_stream.exponential(1.0 / cfg.rate_per_client)
            if at > cfg.duration:
                self._finish_client()
                return
        self.sim.kernel.schedule(at, EventKind.ARRIVAL,
                                 lambda: self._arrive(client, emitted))

    def _finish_client(self) -> None:
        self._active_clients -= 1
        if self._active_clients == 0:
            self.sim.on_workload_progress()

    def _arrive(self, client: int, emitted: int) -> None:
        tx = self._create(client, self.sim.kernel.now)
        self._schedule_next(client, emitted + 1)
        self.sim.submit(tx)

    def _create(self, client_id: int, at: float) -> Transaction:
        tx = Transaction(len(self.txs), client_id, at)
        primary = self._probs[0]
        assign_dependency(tx, self.pool, primary, self._dep_streams[primary])
        for p in self._probs[1:]:
            stream = self._dep_streams[p]
            parent = -1
            if p > 0.0 and stream.uniform() < p and len(self.pool) > 0:
                parent = self.pool.choose(stream)
            self.extra_parents[p].append(parent)
        self.pool.add(tx.tx_id)
        self.txs.append(tx)
        return tx

    # -- pool mode -----------------------------------------------------------

    def next_pooled(self) -> Transaction | None:
        if self._pool_cursor >= len(self.pending_pool):
            return None
        tx = self.pending_pool[self._pool_cursor]
        self._pool_cursor += 1
        return tx

    def pool_exhausted(self) -> bool:
        return self._pool_cursor >= len(self.pending_pool)

    @property
    def created(self) -> int:
        return len(self.txs)

    def exhausted(self) -> bool:
        if self.cfg.arrival_process == "pool":
            return self.pool_exhausted()
        return self._active_clients == 0
