"""Deadline-aware explicit ODE integration.

The scaling-gain ratio grows like h/(deadline - t), so a fixed step blows
up near each stage deadline. The grid shrinks steps in proportion to the
remaining time (capping gain*step per step), stops the active branch at
the guard point deadline - epsilon_rel*T, snaps one step onto the
deadline itself (where the ratio switches to its zero branch), and
continues uniformly afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import GridTooFine, NonFiniteState, ValidationError
from .scaling import StageSchedule

METHOD_RK4 = "rk4"
METHOD_EULER = "euler"


@dataclass(frozen=True)
class IntegratorConfig:
    """Step-size policy.

    ``gain_cap_theta`` caps the product (scaling ratio) * (step) within a
    stage: step = min(base_step, theta * (T + t_s - t) / h). Euler exists
    only as the cross-check oracle.
    """

    base_step: float = 2e-5
    gain_cap_theta: float = 0.1
    min_step: float = 1e-12
    method: str = METHOD_RK4
    max_grid_points: int = 10_000_000

    def __post_init__(self):
        if not (0 < self.min_step < self.base_step):
            raise ValidationError(
                f"need 0 < min_step < base_step, got {self.min_step}, {self.base_step}"
            )
        if not (0 < self.gain_cap_theta < 1):
            raise ValidationError(f"gain_cap_theta must be in (0, 1), got {self.gain_cap_theta}")
        if self.method not in (METHOD_RK4, METHOD_EULER):
            raise ValidationError(f"unknown method {self.method!r}")

    def with_overrides(self, **kwargs):
        return replace(self, **kwargs)


def build_time_grid(schedule: StageSchedule, cfg: IntegratorConfig, t_end=None) -> np.ndarray:
    """Strictly increasing times covering [t0, t_end].

    Within each stage the step is min(base_step, theta*(T + t_s - t)/h),
    the last in-stage point lands exactly on the guard, and one snap step
    bridges guard -> deadline. After the final deadline the grid is
    uniform at base_step up to ``t_end`` (default: the final deadline).
    """
    cap = cfg.max_grid_points
    points = [schedule.t0]
    for k, spec in enumerate(schedule.stages):
        guard = schedule.guard(k)
        t = spec.t_start
        while t < guard:
            dt = min(cfg.base_step, cfg.gain_cap_theta * (spec.deadline - t) / spec.exponent)
            dt = max(dt, cfg.min_step)
            t = guard if t + dt >= guard else t + dt
            points.append(t)
            if len(points) > cap:
                raise GridTooFine(f"grid exceeds {cap} points in stage {k + 1}")
        points.append(spec.deadline)

    final = schedule.final_deadline
    if t_end is not None and t_end > final:
        t = final
        while t + cfg.base_step < t_end - 0.5 * cfg.base_step:
            t += cfg.base_step
            points.append(t)
            if len(points) > cap:
                raise GridTooFine(f"grid exceeds {cap} points in the post-deadline tail")
        points.append(t_end)

    return np.array(points)


def integrate(rhs, y0, grid, method=METHOD_RK4, component_label=None):
    """March ``dy/dt = rhs(t, y)`` across ``grid``.

    Classical 4-stage Runge-Kutta by default (``method='euler'`` gives
    forward Euler). Deterministic: identical inputs produce bitwise
    identical output. Returns (Y, Ydot), each of shape (len(grid), m);
    Ydot holds the RHS evaluated at each grid point.

    Raises NonFiniteState as soon as any component leaves the reals;
    ``component_label`` maps a flat index to a human-readable name for
    that error.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 1 or np.any(np.diff(grid) <= 0):
        raise ValidationError("grid must be 1-D with strictly increasing times")
    y = np.array(y0, dtype=float).ravel()
    S, m = grid.size, y.size
    Y = np.empty((S, m))
    Ydot = np.empty((S, m))
    Y[0] = y
    Ydot[0] = rhs(grid[0], y)
    for k in range(S - 1):
        t, h = grid[k], grid[k + 1] - grid[k]
        k1 = Ydot[k]
        if method == METHOD_RK4:
            k2 = rhs(t + 0.5 * h, y + (0.5 * h) * k1)
            k3 = rhs(t + 0.5 * h, y + (0.5 * h) * k2)
            k4 = rhs(t + h, y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        else:
            y = y + h * k1
        if not np.all(np.isfinite(y)):
            idx = int(np.flatnonzero(~np.isfinite(y))[0])
            label = component_label(idx) if component_label else f"component {idx}"
            raise NonFiniteState(grid[k + 1], label)
        Y[k + 1] = y
        Ydot[k + 1] = rhs(grid[k + 1], y)
    return Y, Ydot


def reference_integrate(rhs, y0, grid, refine=10):
    """First-order Euler on a ``refine``-times finer grid, reported on ``grid``.

    Cross-method oracle used to bound the global error of the RK4 path;
    each grid interval is split into ``refine`` equal substeps.
    """
    grid = np.asarray(grid, dtype=float)
    y = np.array(y0, dtype=float).ravel()
    Y = np.empty((grid.size, y.size))
    Y[0] = y
    for k in range(grid.size - 1):
        t, h = grid[k], (grid[k + 1] - grid[k]) / refine
        for j in range(refine):
            y = y + h * rhs(t + j * h, y)
        if not np.all(np.isfinite(y)):
            raise NonFiniteState(grid[k + 1], "reference Euler state")
        Y[k + 1] = y
    return Y


@dataclass
class Trajectory:
    """Time-indexed samples of the stacked system state.

    Arrays are indexed (sample, agent, component). ``diagnostics`` is
    attached after the fact by the diagnostics module; ``samples()``
    yields the per-sample view (t, SystemState, DiagnosticsSample).
    """

    times: np.ndarray
    X: np.ndarray
    Phi: np.ndarray
    Xdot: np.ndarray
    Phidot: np.ndarray
    deadlines: list
    guards: list
    diagnostics: object = None

    @property
    def n_samples(self):
        return self.times.size

    @property
    def n_agents(self):
        return self.X.shape[1]

    def index_at(self, t):
        """Index of the sample at exactly time ``t`` (grid membership assumed)."""
        k = int(np.searchsorted(self.times, t))
        if k >= self.times.size or self.times[k] != t:
            raise ValidationError(f"time {t} is not a grid point")
        return k

    def state_at(self, k):
        from .dynamics import SystemState

        return SystemState.from_arrays(self.times[k], self.X[k], self.Phi[k])

    def samples(self):
        for k in range(self.n_samples):
            diag = self.diagnostics.sample(k) if self.diagnostics is not None else None
            yield self.times[k], self.state_at(k), diag


def simulate(field, X0, Phi0, cfg: IntegratorConfig, t_end=None, grid=None) -> Trajectory:
    """Integrate a dynamics vector field from (X0, Phi0) and split the result.

    ``field`` provides rhs_flat/pack/unpack/component_label and the stage
    schedule (see dynamics.VectorField). The grid is built from the
    schedule unless one is supplied.
    """
    schedule = field.schedule
    if grid is None:
        grid = build_time_grid(schedule, cfg, t_end=t_end)
    y0 = field.pack(X0, Phi0)
    Y, Ydot = integrate(field.rhs_flat, y0, grid, method=cfg.method,
                        component_label=field.component_label)
    S = grid.size
    N, n = field.n_agents, field.dim
    half = N * n
    return Trajectory(
        times=np.asarray(grid, dtype=float),
        X=Y[:, :half].reshape(S, N, n),
        Phi=Y[:, half:].reshape(S, N, n),
        Xdot=Ydot[:, :half].reshape(S, N, n),
        Phidot=Ydot[:, half:].reshape(S, N, n),
        deadlines=list(schedule.deadlines),
        guards=list(schedule.guards),
    )
