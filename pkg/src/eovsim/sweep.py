"""Parameter sweeps: Cartesian grid x seeds over a base scenario.

Each run is independent (its own kernel); a failing run is recorded in its
summary row under `error` and the sweep continues. Row order follows the
sorted grid keys, then value order, then seed order, so output is stable.
"""

from __future__ import annotations

import itertools

from .config import ConfigError, ScenarioConfig, set_by_path
from .kernel import SimulationError
from .metrics import summary_row
from .simulate import run_scenario

__all__ = ["expand_grid", "run_sweep"]


def expand_grid(base: ScenarioConfig, grid: dict, seeds) -> list[ScenarioConfig]:
    """All grid-point configs, in deterministic order."""
    keys = sorted(grid)
    combos = itertools.product(*(grid[k] for k in keys)) if keys else [()]
    configs = []
    for combo in combos:
        cfg = base
        for key, value in zip(keys, combo):
            cfg = set_by_path(cfg, key, value)
        for seed in seeds:
            configs.append(cfg.with_seed(int(seed)))
    return configs


def run_sweep(base: ScenarioConfig, grid: dict, seeds, collect_traces: bool = False):
    """Run the grid; returns (rows, results). Failures leave results[i] None."""
    rows = []
    results = []
    for cfg in expand_grid(base, grid, seeds):
        try:
            result = run_scenario(cfg, collect_traces=collect_traces)
            rows.append(summary_row(result))
            results.append(result)
        except (SimulationError, ConfigError, AssertionError) as exc:
            from .config import config_hash
            rows.append({"config_hash": config_hash(cfg), "seed": cfg.seed,
                         "status": "failed", "error": f"{type(exc).__name__}: {exc}"})
            results.append(None)
    return rows, results
