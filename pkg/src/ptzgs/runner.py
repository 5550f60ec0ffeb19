"""Simulation orchestration: one validated config in, trajectory + report out."""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ScenarioConfig
from .diagnostics import (
    TOL_ENV,
    DiagnosticsTable,
    EnvelopeReport,
    TheoryConstants,
    compute_diagnostics,
    envelope_check,
    theory_constants,
)
from .dynamics import VectorField
from .errors import EnvelopeViolation
from .integrator import Trajectory, simulate
from .objective import global_minimizer

ER_TARGET = 1e-2
POST_DEADLINE_HOLD = 0.2  # fraction of the total horizon simulated past the final deadline


@dataclass(frozen=True)
class RunReport:
    """Summary of one simulation run."""

    final_er: np.ndarray
    er_target: float
    time_to_target: float | None
    envelope_max_ratio: float
    envelope_passed: bool
    wall_time_s: float
    n_samples: int

    def summary(self):
        reached = ("never" if self.time_to_target is None
                   else f"t = {self.time_to_target:.6g} s")
        return (
            f"max final Er = {float(self.final_er.max()):.3e}; "
            f"Er <= {self.er_target:g} reached at {reached}; "
            f"envelope max ratio = {self.envelope_max_ratio:.4f} "
            f"({'ok' if self.envelope_passed else 'VIOLATED'}); "
            f"{self.n_samples} samples in {self.wall_time_s:.2f} s"
        )


@dataclass(frozen=True)
class RunResult:
    config: ScenarioConfig
    constants: TheoryConstants
    xstar: np.ndarray
    trajectory: Trajectory
    diagnostics: DiagnosticsTable
    envelope: EnvelopeReport
    report: RunReport


def run(config: ScenarioConfig, csv_path=None) -> RunResult:
    """Simulate a scenario to its final deadline plus the post-deadline hold.

    Writes the trajectory CSV when ``csv_path`` is given. An envelope
    violation does not abort the run; it is recorded in the report so the
    CLI can map it to its exit code.
    """
    t_begin = time.perf_counter()
    schedule = config.schedule
    consts = theory_constants(config.graph, config.models, config.params)
    xstar = global_minimizer(config.models.models)

    field = VectorField(config.graph, config.models, config.params, schedule)
    horizon = schedule.final_deadline - schedule.t0
    t_end = schedule.final_deadline + POST_DEADLINE_HOLD * horizon
    phi0 = np.zeros_like(config.initial_x)
    traj = simulate(field, config.initial_x, phi0, config.integrator, t_end=t_end)
    diag = compute_diagnostics(traj, config.models, config.params, consts, xstar)

    try:
        env = envelope_check(traj, consts, schedule, config.variant)
    except EnvelopeViolation as exc:
        env = EnvelopeReport(
            variant=config.variant,
            alpha=consts.alpha2 if config.variant == "ss" else consts.alpha1,
            anchor_time=schedule.t0 if config.variant == "ss" else schedule.stages[1].t_start,
            anchor_value=float("nan"),
            max_ratio=float(exc.worst_ratio),
            worst_time=float(exc.worst_time),
            tol=TOL_ENV,
        )

    below = diag.er.max(axis=1) <= ER_TARGET
    time_to_target = float(traj.times[int(np.argmax(below))]) if below.any() else None
    wall = time.perf_counter() - t_begin

    report = RunReport(
        final_er=diag.er[-1],
        er_target=ER_TARGET,
        time_to_target=time_to_target,
        envelope_max_ratio=env.max_ratio,
        envelope_passed=env.passed,
        wall_time_s=wall,
        n_samples=traj.n_samples,
    )
    if csv_path is not None:
        write_trajectory_csv(csv_path, traj, diag)
    return RunResult(
        config=config, constants=consts, xstar=xstar, trajectory=traj,
        diagnostics=diag, envelope=env, report=report,
    )


def csv_header(n_agents, dim):
    cols = ["t"]
    cols += [f"x{i + 1}_{j + 1}" for i in range(n_agents) for j in range(dim)]
    cols += [f"s_norm_{i + 1}" for i in range(n_agents)]
    cols += [f"er_{i + 1}" for i in range(n_agents)]
    cols += ["V_M", "V_S", "grad_sum_norm", "f_err", "zgs2_norm"]
    return cols


def write_trajectory_csv(path, traj: Trajectory, diag: DiagnosticsTable):
    """One row per trajectory sample; floats as shortest round-trip decimals."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    S, N, n = traj.X.shape
    body = np.concatenate(
        [
            traj.times[:, None],
            traj.X.reshape(S, N * n),
            diag.s_norm,
            diag.er,
            diag.V_M[:, None],
            diag.V_S[:, None],
            diag.grad_sum_norm[:, None],
            diag.f_err[:, None],
            diag.zgs2_norm[:, None],
        ],
        axis=1,
    )
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(csv_header(N, n))
        for row in body:
            writer.writerow([format(v, ".17g") for v in row])
    return path
