"""Bundled scenarios runnable by name from the CLI."""

from __future__ import annotations

from .config import DEFAULT_SEED, ScenarioConfig, build_config
from .dynamics import VARIANT_MS, VARIANT_SS

PAPER_SEC4 = "paper-sec4"

# Six agents on the unit-weight cycle 1-2-3-4-5-6-1, two-dimensional
# quadratic objectives. The cycle stands in for the original case study's
# unspecified six-node topology; the prescribed-time guarantees hold on
# any connected graph.
_SEC4_EDGES = [[1, 2], [2, 3], [3, 4], [4, 5], [5, 6], [6, 1]]
_SEC4_OBJECTIVES = [
    {"Q": [[1.0, 0.0], [0.0, 1.0]], "center": [1.0, 2.0]},
    {"Q": [[1.0, 0.0], [0.0, 1.0]], "center": [3.0, 4.0]},
    {"Q": [[1.0, 0.0], [0.0, 1.0]], "center": [5.0, 6.0]},
    {"Q": [[1.0, 0.0], [0.0, 2.0]], "center": [0.0, 0.0]},
    {"Q": [[2.0, 0.0], [0.0, 1.0]], "center": [0.0, 0.0]},
    {"Q": [[3.0, 0.0], [0.0, 2.0]], "center": [0.0, 0.0]},
]
_SEC4_GAINS = {"kappa1": 2.0, "kappa2": 3.0, "c": 1.0}
_SEC4_SCHEDULES = {
    VARIANT_MS: {"T1": 0.1, "h1": 3.0, "T2": 0.2, "h2": 2.5},
    VARIANT_SS: {"T1": 0.3, "h1": 2.3},
}


def preset_names():
    return [PAPER_SEC4]


def preset_dict(name, algorithm, seed=None):
    """Raw config dictionary for a preset (same schema as config files)."""
    if name != PAPER_SEC4:
        raise ValueError(f"unknown preset {name!r}; available: {preset_names()}")
    if algorithm not in (VARIANT_MS, VARIANT_SS):
        raise ValueError(f"algorithm must be '{VARIANT_MS}' or '{VARIANT_SS}', got {algorithm!r}")
    return {
        "variant": algorithm,
        "graph": {"n": 6, "edges": [list(e) for e in _SEC4_EDGES]},
        "objectives": [dict(o) for o in _SEC4_OBJECTIVES],
        "params": dict(_SEC4_GAINS),
        "schedule": dict(_SEC4_SCHEDULES[algorithm]),
        "initial_x": {"box": [-5.0, 5.0]},
        "seed": DEFAULT_SEED if seed is None else int(seed),
    }


def preset_config(name, algorithm, seed=None) -> ScenarioConfig:
    """Validated ScenarioConfig for a preset."""
    return build_config(preset_dict(name, algorithm, seed=seed),
                        name=f"{name}-{algorithm}")
