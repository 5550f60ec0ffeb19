"""Static figures rendered next to the CSV output.

Four panels per run: agent state components, normalized residuals (log
scale), sliding-surface norms, and the global function error (log scale).
Figures are built directly on matplotlib Figure objects so parallel
sweeps never touch pyplot's global state.
"""

from __future__ import annotations

from pathlib import Path

from matplotlib.figure import Figure

from .diagnostics import DiagnosticsTable
from .integrator import Trajectory
from .scaling import StageSchedule


def _deadline_markers(ax, schedule: StageSchedule):
    for deadline in schedule.deadlines:
        ax.axvline(deadline, color="0.4", linestyle="--", linewidth=0.9)


def _new_axes():
    fig = Figure(figsize=(7.0, 4.2), dpi=130)
    ax = fig.subplots()
    ax.grid(True, alpha=0.3)
    ax.set_xlabel("t [s]")
    return fig, ax


def emit_plots(traj: Trajectory, diag: DiagnosticsTable, schedule: StageSchedule,
               out_dir, prefix="") -> list:
    """Write the four standard figures into ``out_dir``; returns the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t = traj.times
    S, N, n = traj.X.shape
    paths = []

    fig, ax = _new_axes()
    for i in range(N):
        for j in range(n):
            ax.plot(t, traj.X[:, i, j], linewidth=1.0, label=f"$x_{{{i + 1},{j + 1}}}$")
    _deadline_markers(ax, schedule)
    ax.set_ylabel("state components")
    ax.legend(fontsize=7, ncol=max(1, N // 2), loc="upper right")
    paths.append(_save(fig, out_dir / f"{prefix}states.png"))

    fig, ax = _new_axes()
    for i in range(N):
        ax.semilogy(t, diag.er[:, i], linewidth=1.0, label=f"agent {i + 1}")
    _deadline_markers(ax, schedule)
    ax.set_ylabel("Er (normalized squared residual)")
    ax.legend(fontsize=7, loc="lower left")
    paths.append(_save(fig, out_dir / f"{prefix}residuals.png"))

    fig, ax = _new_axes()
    for i in range(N):
        ax.plot(t, diag.s_norm[:, i], linewidth=1.0, label=f"agent {i + 1}")
    _deadline_markers(ax, schedule)
    ax.set_ylabel(r"$\|s_i\|$")
    ax.legend(fontsize=7, loc="upper right")
    paths.append(_save(fig, out_dir / f"{prefix}surfaces.png"))

    fig, ax = _new_axes()
    ax.semilogy(t, diag.f_err, linewidth=1.2, color="tab:red")
    _deadline_markers(ax, schedule)
    ax.set_ylabel("global function error")
    paths.append(_save(fig, out_dir / f"{prefix}function_error.png"))

    return paths


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path)
    return path
