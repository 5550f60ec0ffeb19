"""Lyapunov values, residuals, proof constants and decay envelopes.

Everything here is evaluated along already-computed trajectories; nothing
feeds back into the dynamics. The two Lyapunov functions are

* ``V_M``: the Bregman gap sum_i [f_i(x*) - f_i(x_i) - grad f_i(x_i)^T (x* - x_i)]
* ``V_S``: (p/2)||s||^2 plus the same Bregman gap,

and their decay envelopes are ``V(anchor) * rho(t)^(-alpha)`` with the
exponents alpha1 (two-stage, consensus stage) and alpha2 (single stage)
built from the graph and curvature constants.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import VARIANT_MS, VARIANT_SS, AlgorithmParams, SystemState
from .errors import EnvelopeViolation, InvalidConstants
from .graph import Graph, spectrum
from .objective import ModelSet
from .scaling import StageSchedule, rho

# Multiplicative slack for envelope checks; discretization error enters
# both the Lyapunov sample and rho^(-alpha) near the guard.
TOL_ENV = 1e-2


@dataclass(frozen=True)
class TheoryConstants:
    """Constants appearing in the convergence envelopes.

    Requires p > delta > kappa2 / (4 c lambda2); sigma_S and both alphas
    are then strictly positive.
    """

    Gamma_max: float
    Psi_max: float
    lambda2: float
    alpha1: float
    p: float
    delta: float
    sigma_S: float
    alpha2: float
    kappa1: float
    kappa2: float
    c: float

    def validate(self):
        lower = self.kappa2 / (4.0 * self.c * self.lambda2)
        if not (self.p > self.delta > lower):
            raise InvalidConstants(
                f"need p > delta > kappa2/(4*c*lambda2) = {lower:.6g}, "
                f"got p={self.p:.6g}, delta={self.delta:.6g}"
            )
        if not (self.alpha1 > 0 and self.sigma_S > 0 and self.alpha2 > 0):
            raise InvalidConstants(
                f"non-positive envelope constants: alpha1={self.alpha1:.6g}, "
                f"sigma_S={self.sigma_S:.6g}, alpha2={self.alpha2:.6g}"
            )


def theory_constants(g: Graph, models, params: AlgorithmParams,
                     p_choice=None, delta_choice=None) -> TheoryConstants:
    """Assemble the envelope constants for a given problem instance.

    When not supplied, delta is twice its lower bound and p twice delta,
    which keeps sigma_S safely away from zero.
    """
    ms = models if isinstance(models, ModelSet) else ModelSet(models)
    lambda2 = spectrum(g).lambda2
    Gamma_max = float(ms.Gammas.max())
    Psi_max = float(ms.psis.max())
    lower = params.kappa2 / (4.0 * params.c * lambda2)
    delta = 2.0 * lower if delta_choice is None else float(delta_choice)
    p = 2.0 * delta if p_choice is None else float(p_choice)
    sigma_S = min(
        2.0 * params.c * lambda2 / Psi_max - params.kappa2 / (2.0 * delta * Psi_max),
        2.0 * params.kappa2 * (p - delta) / p,
    )
    consts = TheoryConstants(
        Gamma_max=Gamma_max,
        Psi_max=Psi_max,
        lambda2=lambda2,
        alpha1=lambda2 * params.c * params.kappa2 / Gamma_max,
        p=p,
        delta=delta,
        sigma_S=sigma_S,
        alpha2=params.kappa1 * sigma_S,
        kappa1=params.kappa1,
        kappa2=params.kappa2,
        c=params.c,
    )
    consts.validate()
    return consts


# -- pointwise Lyapunov evaluations ------------------------------------


def lyapunov_Vi(state: SystemState, models, params: AlgorithmParams):
    """Per-agent surface energies (1/2)||s_i||^2."""
    ms = models if isinstance(models, ModelSet) else ModelSet(models)
    S = ms.gradients(state.X) + params.c * state.Phi
    return 0.5 * np.einsum("ni,ni->n", S, S)


def lyapunov_VM(state: SystemState, models, xstar):
    """Bregman gap of the stacked state to the global minimizer."""
    ms = models if isinstance(models, ModelSet) else ModelSet(models)
    return float(ms.bregman_to(state.X, xstar))


def lyapunov_VS(state: SystemState, models, xstar, consts: TheoryConstants):
    """(p/2)||s||^2 + Bregman gap; reduces to V_M on the surface s = 0."""
    consts.validate()
    ms = models if isinstance(models, ModelSet) else ModelSet(models)
    S = ms.gradients(state.X) + consts.c * state.Phi
    return 0.5 * consts.p * float(np.sum(S * S)) + float(ms.bregman_to(state.X, xstar))


def residual_Er(X, x0, xstar):
    """Per-agent normalized squared residuals ||x_i - x*||^2 / ||x_i(0) - x*||^2.

    ``X`` may be (N, n) or a (S, N, n) batch. Agents that start exactly at
    x* get the absolute squared distance instead; the companion flags from
    ``er_normalizers`` say which.
    """
    denom, _ = er_normalizers(x0, xstar)
    d = np.asarray(X, dtype=float) - np.asarray(xstar, dtype=float)
    return np.einsum("...ni,...ni->...n", d, d) / denom


def er_normalizers(x0, xstar):
    """(denominators, absolute_flags) for the Er residual.

    A zero initial offset cannot normalize; those agents are flagged and
    use denominator 1 (absolute squared distance).
    """
    d0 = np.asarray(x0, dtype=float) - np.asarray(xstar, dtype=float)
    denom = np.einsum("ni,ni->n", d0, d0)
    flags = denom == 0.0
    return np.where(flags, 1.0, denom), flags


# -- trajectory-level table --------------------------------------------


@dataclass(frozen=True)
class DiagnosticsSample:
    """Diagnostic scalars at one trajectory sample."""

    er: np.ndarray
    s_norm: np.ndarray
    V_M: float
    V_S: float
    grad_sum_norm: float
    f_err: float
    zgs2_norm: float


@dataclass(frozen=True)
class DiagnosticsTable:
    """Diagnostics for every trajectory sample, stored column-wise."""

    er: np.ndarray           # (S, N)
    s_norm: np.ndarray       # (S, N)
    V_M: np.ndarray          # (S,)
    V_S: np.ndarray          # (S,)
    grad_sum_norm: np.ndarray
    f_err: np.ndarray
    zgs2_norm: np.ndarray
    er_absolute: np.ndarray  # (N,) flags: Er reported unnormalized

    def sample(self, k) -> DiagnosticsSample:
        return DiagnosticsSample(
            er=self.er[k],
            s_norm=self.s_norm[k],
            V_M=float(self.V_M[k]),
            V_S=float(self.V_S[k]),
            grad_sum_norm=float(self.grad_sum_norm[k]),
            f_err=float(self.f_err[k]),
            zgs2_norm=float(self.zgs2_norm[k]),
        )


def compute_diagnostics(traj, models, params: AlgorithmParams, consts: TheoryConstants,
                        xstar, x0=None) -> DiagnosticsTable:
    """Evaluate every diagnostic along a trajectory (vectorized over samples)."""
    ms = models if isinstance(models, ModelSet) else ModelSet(models)
    X, Phi, Xdot = traj.X, traj.Phi, traj.Xdot
    x0 = X[0] if x0 is None else np.asarray(x0, dtype=float)

    G = ms.gradients(X)                          # (S, N, n)
    S_surf = G + params.c * Phi
    s_norm = np.linalg.norm(S_surf, axis=2)
    grad_sum_norm = np.linalg.norm(G.sum(axis=1), axis=1)

    bregman = ms.bregman_to(X, xstar)            # (S,)
    V_M = bregman
    V_S = 0.5 * consts.p * np.sum(s_norm**2, axis=1) + bregman

    values = ms.values(X)                        # (S, N)
    f_star = float(ms.values(np.broadcast_to(xstar, (ms.n_agents, ms.dim))).sum())
    f_err = np.abs(values.sum(axis=1) - f_star)

    zgs2 = ms.apply_hessians(X, Xdot).sum(axis=1)
    zgs2_norm = np.linalg.norm(zgs2, axis=1)

    denom, flags = er_normalizers(x0, xstar)
    d = X - np.asarray(xstar, dtype=float)
    er = np.einsum("sni,sni->sn", d, d) / denom

    table = DiagnosticsTable(
        er=er, s_norm=s_norm, V_M=V_M, V_S=V_S,
        grad_sum_norm=grad_sum_norm, f_err=f_err, zgs2_norm=zgs2_norm,
        er_absolute=flags,
    )
    traj.diagnostics = table
    return table


def consensus_bound_chain(traj, g: Graph, models, consts: TheoryConstants):
    """Optional verbose check: the intermediate chain bounding V_M.

    Returns per-sample columns for V_M, the mean-anchored Bregman gap,
    the curvature bound (Gamma_max/2) sum_i ||x_i - xbar||^2 and the
    disagreement bound (Gamma_max/lambda2) x^T (L kron I) x. The chain
    V_M <= mean_bregman <= spread_bound <= disagreement_bound only holds
    where the gradient sum vanishes; it is debugging scaffolding, not a
    default assertion.
    """
    ms = models if isinstance(models, ModelSet) else ModelSet(models)
    from .graph import laplacian as _laplacian

    X = traj.X
    xbar = X.mean(axis=1)                                   # (S, n)
    mean_bregman = np.array([ms.bregman_to(Xk, xb) for Xk, xb in zip(X, xbar)])
    spread = np.sum((X - xbar[:, None, :]) ** 2, axis=(1, 2))
    L = _laplacian(g)
    disagreement = np.einsum("sni,nm,smi->s", X, L, X)
    xstar_bregman = traj.diagnostics.V_M if traj.diagnostics is not None else None
    return {
        "V_M": xstar_bregman,
        "mean_bregman": mean_bregman,
        "spread_bound": 0.5 * consts.Gamma_max * spread,
        "disagreement_bound": consts.Gamma_max / consts.lambda2 * disagreement,
    }


# -- envelope verification ---------------------------------------------


@dataclass(frozen=True)
class EnvelopeReport:
    """Outcome of checking samples against a theoretical decay envelope."""

    variant: str
    alpha: float
    anchor_time: float
    anchor_value: float
    max_ratio: float
    worst_time: float
    tol: float

    @property
    def passed(self):
        return self.max_ratio <= 1.0 + self.tol


def envelope_check(traj, consts: TheoryConstants, schedule: StageSchedule,
                   variant: str, tol_env: float = TOL_ENV) -> EnvelopeReport:
    """Assert the Lyapunov envelope along a diagnosed trajectory.

    Single stage: V_S(t) <= (1+tol) V_S(t0) rho1(t)^(-alpha2) at every
    sample. Two stages: V_M(t) <= (1+tol) V_M(t1) rho2(t)^(-alpha1) at
    every sample from the stage boundary t1 onwards (V_M only starts
    decaying once the surfaces have been driven to zero).

    Returns the report; raises EnvelopeViolation when the worst sample
    exceeds the envelope.
    """
    diag = traj.diagnostics
    if diag is None:
        raise ValueError("trajectory has no diagnostics attached; run compute_diagnostics first")
    consts.validate()

    if variant == VARIANT_SS:
        spec = schedule.stages[0]
        alpha = consts.alpha2
        anchor_idx = 0
        times = traj.times
        values = diag.V_S
    elif variant == VARIANT_MS:
        spec = schedule.stages[1]
        alpha = consts.alpha1
        anchor_idx = traj.index_at(spec.t_start)
        times = traj.times[anchor_idx:]
        values = diag.V_M[anchor_idx:]
    else:
        raise ValueError(f"unknown variant {variant!r}")

    anchor_time = float(traj.times[anchor_idx])
    anchor_value = float(values[0])
    if anchor_value == 0.0:
        # Degenerate start at the optimum: the envelope is identically zero.
        max_ratio = 0.0 if float(np.max(values)) <= 1e-15 else np.inf
        worst_time = float(times[int(np.argmax(values))])
    else:
        bound = anchor_value * rho(spec, times) ** (-alpha)
        ratios = values / bound
        worst = int(np.argmax(ratios))
        max_ratio = float(ratios[worst])
        worst_time = float(times[worst])

    report = EnvelopeReport(
        variant=variant, alpha=alpha, anchor_time=anchor_time,
        anchor_value=anchor_value, max_ratio=max_ratio,
        worst_time=worst_time, tol=tol_env,
    )
    if not report.passed:
        raise EnvelopeViolation(
            f"envelope exceeded: V/bound = {max_ratio:.6g} at t = {worst_time:.9g}",
            worst_time=worst_time, worst_ratio=max_ratio,
        )
    return report
