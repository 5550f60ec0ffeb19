"""Right-hand sides of the two sliding-mode consensus optimization flows.

Both algorithm variants share one state layout per agent: the local
optimization variable ``x_i`` and the integral state ``phi_i`` that backs
the sliding surface ``s_i = grad f_i(x_i) + c * phi_i``. Starting with
``phi_i = 0`` keeps the surface exactly consistent with its defining
integral, and the Laplacian row structure conserves ``sum_i phi_i = 0``
along every trajectory.

State vectors for the integrator are stacked flat as
``(x_1 ... x_N, phi_1 ... phi_N)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, ValidationError
from .graph import Graph, laplacian
from .objective import ModelSet
from .scaling import StageSchedule, rho_ratio

VARIANT_MS = "ms"
VARIANT_SS = "ss"


@dataclass(frozen=True)
class AlgorithmParams:
    """Tuning gains kappa1, kappa2, c (all > 0) and the algorithm variant."""

    kappa1: float
    kappa2: float
    c: float
    variant: str

    def __post_init__(self):
        for name in ("kappa1", "kappa2", "c"):
            if not (getattr(self, name) > 0):
                raise ValidationError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.variant not in (VARIANT_MS, VARIANT_SS):
            raise ValidationError(f"variant must be '{VARIANT_MS}' or '{VARIANT_SS}', got {self.variant!r}")


@dataclass(frozen=True)
class AgentState:
    x: np.ndarray
    phi: np.ndarray


@dataclass(frozen=True)
class SystemState:
    """Stacked agent states at one time instant."""

    t: float
    agents: tuple

    @classmethod
    def from_arrays(cls, t, X, Phi):
        X = np.asarray(X, dtype=float)
        Phi = np.asarray(Phi, dtype=float)
        if X.shape != Phi.shape or X.ndim != 2:
            raise DimensionMismatch(f"X {X.shape} and Phi {Phi.shape} must both be (N, n)")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Phi))):
            raise ValidationError("state contains non-finite entries")
        agents = tuple(AgentState(x.copy(), p.copy()) for x, p in zip(X, Phi))
        return cls(float(t), agents)

    @property
    def n_agents(self):
        return len(self.agents)

    @property
    def X(self):
        return np.stack([a.x for a in self.agents])

    @property
    def Phi(self):
        return np.stack([a.phi for a in self.agents])


@dataclass(frozen=True)
class StateDerivative:
    """Time derivative of the stacked state, same (N, n) layout."""

    x_dot: np.ndarray
    phi_dot: np.ndarray


class VectorField:
    """Evaluates one variant's RHS over stacked (X, Phi) arrays.

    Pure: state in, derivative out. The per-agent Hessian systems are
    solved through the model set's Cholesky path, never by forming an
    inverse.
    """

    def __init__(self, graph: Graph, models, params: AlgorithmParams, schedule: StageSchedule):
        self.models = models if isinstance(models, ModelSet) else ModelSet(models)
        if self.models.n_agents != graph.n:
            raise DimensionMismatch(
                f"{self.models.n_agents} models for {graph.n} agents"
            )
        expected = 2 if params.variant == VARIANT_MS else 1
        if schedule.n_stages != expected:
            raise ValidationError(
                f"variant {params.variant!r} needs {expected} stage(s), schedule has {schedule.n_stages}"
            )
        self.graph = graph
        self.params = params
        self.schedule = schedule
        self.L = laplacian(graph)
        self.n_agents = graph.n
        self.dim = self.models.dim

    # -- state packing -------------------------------------------------

    def pack(self, X, Phi):
        return np.concatenate([np.asarray(X, float).ravel(), np.asarray(Phi, float).ravel()])

    def unpack(self, y):
        half = self.n_agents * self.dim
        return y[:half].reshape(self.n_agents, self.dim), y[half:].reshape(self.n_agents, self.dim)

    def component_label(self, flat_index):
        half = self.n_agents * self.dim
        block, name = (flat_index, "x") if flat_index < half else (flat_index - half, "phi")
        agent, comp = divmod(block, self.dim)
        return f"agent {agent + 1}, {name}[{comp}]"

    # -- dynamics ------------------------------------------------------

    def surface(self, X, Phi):
        """Sliding surfaces s_i = grad f_i(x_i) + c * phi_i, shape (N, n)."""
        return self.models.gradients(X) + self.params.c * np.asarray(Phi, dtype=float)

    def rhs(self, t, X, Phi):
        """(Xdot, Phidot) at time t."""
        p = self.params
        S = self.models.gradients(X) + p.c * Phi
        LX = self.L @ X
        if p.variant == VARIANT_MS:
            r1 = rho_ratio(self.schedule.stages[0], t)
            r2 = rho_ratio(self.schedule.stages[1], t)
            Phidot = (p.kappa2 * r2) * LX
            forcing = -(p.kappa1 + r1) * S - (p.c * p.kappa2 * r2) * LX
        else:
            r1 = rho_ratio(self.schedule.stages[0], t)
            Phidot = (p.kappa1 * r1) * LX
            forcing = (p.kappa1 * r1) * (-p.kappa2 * S - p.c * LX)
        Xdot = self.models.solve_hessians(X, forcing)
        return Xdot, Phidot

    def rhs_flat(self, t, y):
        X, Phi = self.unpack(y)
        Xdot, Phidot = self.rhs(t, X, Phi)
        return np.concatenate([Xdot.ravel(), Phidot.ravel()])


def _as_modelset(models):
    return models if isinstance(models, ModelSet) else ModelSet(models)


def sliding_surface(state: SystemState, models, params: AlgorithmParams):
    """Per-agent surfaces s_i = grad f_i(x_i) + c * phi_i as an (N, n) array."""
    ms = _as_modelset(models)
    X = state.X
    if X.shape[1] != ms.dim:
        raise DimensionMismatch(f"state dim {X.shape[1]} != model dim {ms.dim}")
    return ms.gradients(X) + params.c * state.Phi


def ms_rhs(state: SystemState, graph: Graph, models, params: AlgorithmParams,
           schedule: StageSchedule) -> StateDerivative:
    """Two-stage variant RHS at the state's time."""
    if params.variant != VARIANT_MS:
        raise ValidationError(f"ms_rhs requires variant '{VARIANT_MS}', got {params.variant!r}")
    field = VectorField(graph, models, params, schedule)
    x_dot, phi_dot = field.rhs(state.t, state.X, state.Phi)
    return StateDerivative(x_dot, phi_dot)


def ss_rhs(state: SystemState, graph: Graph, models, params: AlgorithmParams,
           schedule: StageSchedule) -> StateDerivative:
    """Single-stage variant RHS at the state's time."""
    if params.variant != VARIANT_SS:
        raise ValidationError(f"ss_rhs requires variant '{VARIANT_SS}', got {params.variant!r}")
    field = VectorField(graph, models, params, schedule)
    x_dot, phi_dot = field.rhs(state.t, state.X, state.Phi)
    return StateDerivative(x_dot, phi_dot)


def gradient_sum(state: SystemState, models):
    """sum_i grad f_i(x_i): the quantity classical ZGS flows pin to zero."""
    return _as_modelset(models).gradients(state.X).sum(axis=0)


def zgs_weighted_velocity_sum(state: SystemState, derivative: StateDerivative, models):
    """sum_i hess f_i(x_i) xdot_i: monitor for the second classical ZGS condition."""
    ms = _as_modelset(models)
    return ms.apply_hessians(state.X, derivative.x_dot).sum(axis=0)
