"""Strategic waiting: pause leading peers, boost the lagger.

Evaluated at every block-commit event. When the height gap (max - min)
exceeds tau but stays at or below the safety ceiling, every max-height peer
pauses its phase-2 commits and the lowest peer's commit distribution mean
switches to the boosted value. Normal behavior resumes once the gap closes
to within tau. Above the ceiling the controller stands down and only logs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .kernel import SimulationIntegrityError

__all__ = ["WaitEvent", "evaluate_wait", "resume_check", "WaitingController"]


@dataclass(frozen=True)
class WaitEvent:
    at: float
    kind: str  # pause_start | pause_end | boost_start | boost_end | ceiling_exceeded
    leader: int
    lagger: int
    gap: int


def evaluate_wait(heights, policy):
    """Decide the controller action for the current heights.

    Returns ("none" | "pause" | "ceiling", leaders, lagger, gap): leaders are
    the max-height peers to pause and lagger the lowest peer (lowest id on
    ties) to boost.
    """
    top = max(heights)
    low = min(heights)
    gap = top - low
    leaders = [i for i, h in enumerate(heights) if h == top]
    lagger = heights.index(low)
    if policy.tau < gap <= policy.ceiling:
        return "pause", leaders, lagger, gap
    if gap > policy.ceiling:
        return "ceiling", leaders, lagger, gap
    return "none", leaders, lagger, gap


def resume_check(heights, policy) -> str:
    """While a pause is active: resume once the gap closes to within tau."""
    gap = max(heights) - min(heights)
    return "resume" if gap <= policy.tau else "continue_pause"


class WaitingController:
    def __init__(self, sim, policy):
        self.sim = sim
        self.policy = policy
        self.active = False
        self.paused: set[int] = set()
        self.boosted_peer: int | None = None
        self.last_gap = 0
        self.events: list[WaitEvent] = []
        self._above_ceiling = False

    # -- boost bookkeeping --------------------------------------------------

    def apply_boost(self, lagger: int) -> None:
        if not self.paused:
            raise SimulationIntegrityError("boost applied while no leader is paused")
        peer = self.sim.peers[lagger]
        peer.boosted = True
        peer.boost_factor = self.policy.boosted_mean / self.policy.baseline_means[lagger]
        self.boosted_peer = lagger

    def release_boost(self) -> None:
        if self.boosted_peer is None:
            return
        peer = self.sim.peers[self.boosted_peer]
        peer.boosted = False
        peer.boost_factor = 1.0
        self.boosted_peer = None

    # -- main hook ------------------------------------------------------------

    def on_commit_event(self) -> None:
        if not self.policy.enabled:
            return
        heights = [p.height for p in self.sim.peers]
        action, leaders, lagger, gap = evaluate_wait(heights, self.policy)
        now = self.sim.kernel.now
        if self.active:
            if gap > self.last_gap:
                raise SimulationIntegrityError(
                    f"height gap grew from {self.last_gap} to {gap} during a pause")
            self.last_gap = gap
            if gap <= self.policy.tau:
                self._release(now, lagger, gap)
            else:
                # a mid peer that caught up to the max must pause as well,
                # otherwise it could push the max (and the gap) back up
                for i in leaders:
                    if i not in self.paused:
                        self._pause_peer(i, now, lagger, gap)
            return
        if action == "pause":
            for i in leaders:
                self._pause_peer(i, now, lagger, gap)
            self.apply_boost(lagger)
            self.events.append(WaitEvent(now, "boost_start", leaders[0], lagger, gap))
            self.active = True
            self.last_gap = gap
            self._above_ceiling = False
        elif action == "ceiling":
            if not self._above_ceiling:
                self.events.append(WaitEvent(now, "ceiling_exceeded", leaders[0], lagger, gap))
                self._above_ceiling = True
        else:
            self._above_ceiling = False

    def _pause_peer(self, i: int, now: float, lagger: int, gap: int) -> None:
        self.sim.peers[i].paused = True
        self.paused.add(i)
        self.events.append(WaitEvent(now, "pause_start", i, lagger, gap))

    def _release(self, now: float, lagger: int, gap: int) -> None:
        lead = min(self.paused)
        for i in sorted(self.paused):
            self.sim.peers[i].paused = False
            self.events.append(WaitEvent(now, "pause_end", i, lagger, gap))
        self.events.append(WaitEvent(now, "boost_end", lead, lagger, gap))
        self.paused.clear()
        self.release_boost()
        self.active = False
        for engine in self.sim.engines:
            engine.kick()
