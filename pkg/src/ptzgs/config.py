"""Scenario configuration: JSON schema, loading and eager validation.

A scenario bundles everything one simulation run needs: graph, per-agent
quadratic objectives, gains, stage schedule, integrator settings and
initial conditions. All invariants (connectivity, SPD objectives, stage
contiguity, consistent agent counts) are checked at load time so that a
run can only fail numerically, not structurally.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dynamics import VARIANT_MS, VARIANT_SS, AlgorithmParams
from .errors import ParseError, ValidationError
from .graph import Graph, assert_connected
from .integrator import IntegratorConfig
from .objective import ModelSet, QuadraticObjective
from .scaling import StageSchedule

DEFAULT_SEED = 1234
DEFAULT_BOX = (-5.0, 5.0)

_TOP_LEVEL_KEYS = {
    "variant", "graph", "objectives", "params", "schedule",
    "integrator", "initial_x", "seed", "output",
}


@dataclass(frozen=True)
class ScenarioConfig:
    """A fully validated simulation scenario."""

    name: str
    variant: str
    graph: Graph
    models: ModelSet
    params: AlgorithmParams
    schedule: StageSchedule
    integrator: IntegratorConfig
    initial_x: np.ndarray  # (N, n)
    seed: int

    @property
    def n_agents(self):
        return self.graph.n

    @property
    def dim(self):
        return self.models.dim


def load_config(path) -> ScenarioConfig:
    """Parse and validate a JSON scenario file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: cannot read config: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return build_config(data, name=path.stem)


def build_config(data, name="scenario") -> ScenarioConfig:
    """Validate a config dictionary and construct all domain objects."""
    if not isinstance(data, dict):
        raise ValidationError("config root must be an object")
    unknown = set(data) - _TOP_LEVEL_KEYS
    if unknown:
        raise ValidationError(f"unknown config field(s): {sorted(unknown)}")

    variant = _require(data, "variant", str)
    if variant not in (VARIANT_MS, VARIANT_SS):
        raise ValidationError(f"variant: must be '{VARIANT_MS}' or '{VARIANT_SS}', got {variant!r}")

    graph = _build_graph(_require(data, "graph", dict))
    models = _build_models(_require(data, "objectives", list), graph.n)
    params = _build_params(_require(data, "params", dict), variant)
    schedule = _build_schedule(_require(data, "schedule", dict), variant)
    integrator = _build_integrator(data.get("integrator", {}))
    seed = data.get("seed", DEFAULT_SEED)
    if not isinstance(seed, int):
        raise ValidationError(f"seed: must be an integer, got {seed!r}")
    initial_x = _build_initial_x(data.get("initial_x"), graph.n, models.dim, seed)

    assert_connected(graph)
    return ScenarioConfig(
        name=name, variant=variant, graph=graph, models=models, params=params,
        schedule=schedule, integrator=integrator, initial_x=initial_x, seed=seed,
    )


def _require(data, key, typ):
    if key not in data:
        raise ValidationError(f"missing required field {key!r}")
    value = data[key]
    if not isinstance(value, typ):
        raise ValidationError(f"{key}: expected {typ.__name__}, got {type(value).__name__}")
    return value


def _build_graph(spec):
    n = _require(spec, "n", int)
    edges = _require(spec, "edges", list)
    try:
        return Graph.from_edges(n, edges)
    except ValidationError as exc:
        raise ValidationError(f"graph: {exc}") from exc


def _build_models(specs, n_agents):
    if len(specs) != n_agents:
        raise ValidationError(f"objectives: expected {n_agents} entries, got {len(specs)}")
    models = []
    for i, spec in enumerate(specs):
        if not isinstance(spec, dict):
            raise ValidationError(f"objectives[{i}]: expected object")
        try:
            models.append(QuadraticObjective(
                Q=_require(spec, "Q", list),
                center=_require(spec, "center", list),
                offset=spec.get("offset", 0.0),
            ))
        except (ValidationError, ValueError) as exc:
            raise ValidationError(f"objectives[{i}]: {exc}") from exc
    return ModelSet(models)


def _build_params(spec, variant):
    try:
        return AlgorithmParams(
            kappa1=float(_require_number(spec, "kappa1")),
            kappa2=float(_require_number(spec, "kappa2")),
            c=float(_require_number(spec, "c")),
            variant=variant,
        )
    except ValidationError as exc:
        raise ValidationError(f"params: {exc}") from exc


def _require_number(spec, key):
    if key not in spec:
        raise ValidationError(f"missing required field {key!r}")
    value = spec[key]
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ValidationError(f"{key}: expected number, got {value!r}")
    return value


def _build_schedule(spec, variant):
    T1 = float(_require_number(spec, "T1"))
    h1 = float(_require_number(spec, "h1"))
    t0 = float(spec.get("t0", 0.0))
    if t0 < 0:
        raise ValidationError(f"schedule.t0: must be >= 0, got {t0}")
    epsilon_rel = float(spec.get("epsilon_rel", 1e-4))
    has_second = "T2" in spec or "h2" in spec
    try:
        if variant == VARIANT_MS:
            if not ("T2" in spec and "h2" in spec):
                raise ValidationError("variant 'ms' requires both T2 and h2")
            return StageSchedule.two_stage(
                T1, h1, float(_require_number(spec, "T2")), float(_require_number(spec, "h2")),
                t0=t0, epsilon_rel=epsilon_rel,
            )
        if has_second:
            raise ValidationError("variant 'ss' forbids T2/h2")
        return StageSchedule.single_stage(T1, h1, t0=t0, epsilon_rel=epsilon_rel)
    except ValidationError as exc:
        raise ValidationError(f"schedule: {exc}") from exc


def _build_integrator(spec):
    if not isinstance(spec, dict):
        raise ValidationError("integrator: expected object")
    allowed = {"base_step", "gain_cap_theta", "min_step", "method", "max_grid_points"}
    unknown = set(spec) - allowed
    if unknown:
        raise ValidationError(f"integrator: unknown field(s) {sorted(unknown)}")
    try:
        return IntegratorConfig(**spec)
    except (ValidationError, TypeError) as exc:
        raise ValidationError(f"integrator: {exc}") from exc


def _build_initial_x(spec, n_agents, dim, seed):
    if spec is None:
        spec = {"box": list(DEFAULT_BOX)}
    if isinstance(spec, dict):
        box = spec.get("box")
        if box is None or len(spec) != 1:
            raise ValidationError("initial_x: object form must be exactly {'box': [lo, hi]}")
        if not (isinstance(box, list) and len(box) == 2 and box[0] < box[1]):
            raise ValidationError(f"initial_x.box: expected [lo, hi] with lo < hi, got {box!r}")
        rng = np.random.default_rng(seed)
        return rng.uniform(float(box[0]), float(box[1]), size=(n_agents, dim))
    if isinstance(spec, list):
        arr = np.asarray(spec, dtype=float)
        if arr.shape != (n_agents, dim):
            raise ValidationError(
                f"initial_x: expected {n_agents} vectors of length {dim}, got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValidationError("initial_x: contains non-finite entries")
        return arr
    raise ValidationError("initial_x: expected list of vectors or {'box': [lo, hi]}")
