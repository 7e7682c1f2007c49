"""VSCC parallelization: the pipelining gain peaks at moderate core counts.

VSCC checks are per-transaction and CPU-bound, so adding cores shrinks the
VSCC share of phase 1 proportionally (scale 1.0 -> 0.25 models 24 -> 96
cores). The pipelined/serial gain rises while phase 1 is the bottleneck and
falls back once phase 1 drops below phase 2: past balance, extra cores only
deepen phase-2 starvation.
"""

from eovsim import DistributionSpec as D
from eovsim import bench_commit
from eovsim.presets import CORE_SCALE_GRID, TABLE_PHASE_CONSTANTS

BLOCK = 4000
CORES = {1.0: 24, 0.75: 32, 0.5: 48, 0.375: 64, 0.25: 96}

for setup in ("4-4", "4-1"):
    c = TABLE_PHASE_CONSTANTS[setup]
    print(f"\nsetup {setup}  (vscc {c['vscc']}s at 24 cores, fetch {c['fetch']}s, "
          f"phase2 {c['p2']}s)")
    print(f"{'cores':>6} {'scale':>6} {'p1':>6} {'time ratio':>10} "
          f"{'serial':>8} {'pipelined':>9} {'gain':>6}")
    best = None
    for scale in CORE_SCALE_GRID:
        p1 = c["vscc"] * scale + c["fetch"]
        serial = bench_commit(D.constant(p1), D.constant(c["p2"]), BLOCK, "serial", 200)
        pipe = bench_commit(D.constant(p1), D.constant(c["p2"]), BLOCK, "pipelined", 200)
        gain = pipe["tps"] / serial["tps"]
        best = max(best or (0, 0), (gain, CORES[scale]))
        print(f"{CORES[scale]:>6} {scale:>6.3f} {p1:6.3f} {p1 / c['p2']:10.3f} "
              f"{serial['tps']:8.1f} {pipe['tps']:9.1f} {gain:6.3f}")
    print(f"  -> peak gain {best[0]:.3f} at {best[1]} cores, where p1 ~ p2")
