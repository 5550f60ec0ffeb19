"""Time-varying scaling functions and stage schedules.

A scaling function grows from 1 to infinity over a finite window
[t_start, t_start + duration) and is 1 outside it. The dynamics only ever
consume the log-derivative ratio, which has the closed form
``exponent / (duration + t_start - t)`` on the active window and 0
elsewhere; using that form avoids evaluating the (astronomically large)
function itself near the deadline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class ScalingSpec:
    """One scaling window: start time, duration T > 0, exponent h > 0."""

    t_start: float
    duration: float
    exponent: float

    def __post_init__(self):
        if not (self.duration > 0):
            raise ValidationError(f"duration must be > 0, got {self.duration}")
        if not (self.exponent > 0):
            raise ValidationError(f"exponent must be > 0, got {self.exponent}")

    @property
    def deadline(self):
        return self.t_start + self.duration


def rho(spec: ScalingSpec, t):
    """Scaling value: (T / (T + t0 - t))^h on [t0, t0+T), 1 otherwise.

    Accepts scalars or arrays.
    """
    t0, T, h = spec.t_start, spec.duration, spec.exponent
    if np.ndim(t) == 0:
        t = float(t)
        if t0 <= t < t0 + T:
            return (T / (T + t0 - t)) ** h
        return 1.0
    t = np.asarray(t, dtype=float)
    out = np.ones_like(t)
    mask = (t >= t0) & (t < t0 + T)
    out[mask] = (T / (T + t0 - t[mask])) ** h
    return out


def rho_ratio(spec: ScalingSpec, t):
    """Log-derivative d(ln rho)/dt: h / (T + t0 - t) on the window, 0 otherwise.

    Accepts scalars or arrays. Never formed as a quotient of two huge
    numbers; this is the analytically simplified ratio.
    """
    t0, T, h = spec.t_start, spec.duration, spec.exponent
    if np.ndim(t) == 0:
        t = float(t)
        if t0 <= t < t0 + T:
            return h / (T + t0 - t)
        return 0.0
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    mask = (t >= t0) & (t < t0 + T)
    out[mask] = h / (T + t0 - t[mask])
    return out


def envelope(spec: ScalingSpec, t, kappa, alpha, V0):
    """Decay envelope V0 * rho(t)^(-alpha) * exp(-kappa * (t - t_start)).

    With alpha=2 and kappa > 0 this is the closed-form solution of
    dV/dt = -(kappa + 2 rho'/rho) V on the active window; with kappa=0 it
    is the power-law bound V0 * rho^(-alpha) that the convergence
    envelopes use. Vanishes as t approaches the deadline for any alpha > 0.
    """
    if kappa < 0:
        raise ValidationError(f"kappa must be >= 0, got {kappa}")
    if not (alpha > 0):
        raise ValidationError(f"alpha must be > 0, got {alpha}")
    if np.any(np.asarray(V0) < 0):
        raise ValidationError("V0 must be nonnegative")
    r = rho(spec, t)
    decay = np.exp(-kappa * (np.asarray(t, dtype=float) - spec.t_start))
    out = V0 * r ** (-alpha) * decay
    return float(out) if np.ndim(t) == 0 else out


@dataclass(frozen=True)
class StageSchedule:
    """Contiguous scaling stages plus the deadline guard fraction.

    Stage k+1 must start exactly at stage k's deadline. The guard point of
    a stage is ``deadline - epsilon_rel * duration``: integration of the
    active branch stops there because the gain ratio diverges at the
    deadline itself.
    """

    stages: tuple
    epsilon_rel: float = 1e-4

    def __post_init__(self):
        stages = tuple(self.stages)
        object.__setattr__(self, "stages", stages)
        if not stages:
            raise ValidationError("schedule needs at least one stage")
        if not (0 < self.epsilon_rel < 0.5):
            raise ValidationError(f"epsilon_rel must be in (0, 0.5), got {self.epsilon_rel}")
        for prev, nxt in zip(stages, stages[1:]):
            if nxt.t_start != prev.deadline:
                raise ValidationError(
                    f"stages must be contiguous: stage starting at {nxt.t_start} "
                    f"does not begin at previous deadline {prev.deadline}"
                )

    @classmethod
    def single_stage(cls, T1, h1, t0=0.0, epsilon_rel=1e-4):
        return cls((ScalingSpec(t0, T1, h1),), epsilon_rel)

    @classmethod
    def two_stage(cls, T1, h1, T2, h2, t0=0.0, epsilon_rel=1e-4):
        first = ScalingSpec(t0, T1, h1)
        second = ScalingSpec(first.deadline, T2, h2)
        return cls((first, second), epsilon_rel)

    @property
    def n_stages(self):
        return len(self.stages)

    @property
    def t0(self):
        return self.stages[0].t_start

    @property
    def final_deadline(self):
        return self.stages[-1].deadline

    @property
    def deadlines(self):
        return [s.deadline for s in self.stages]

    def guard(self, k):
        """Guard point of stage k: deadline minus epsilon_rel * duration."""
        s = self.stages[k]
        return s.deadline - self.epsilon_rel * s.duration

    @property
    def guards(self):
        return [self.guard(k) for k in range(len(self.stages))]
