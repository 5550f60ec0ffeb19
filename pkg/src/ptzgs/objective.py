"""Per-agent strongly convex objective models.

Each agent owns a twice continuously differentiable local objective with
known strong-convexity constant ``gamma``, Hessian upper bound ``Gamma``
and smoothness constant ``psi``. Quadratics are the shipped family (their
Hessians are globally SPD, which the dynamics' Hessian-inverse requires);
arbitrary models plug in through the same evaluator interface.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, DimensionMismatch, NonFiniteInput, SingularHessian, ValidationError


class ObjectiveModel:
    """Evaluator interface: value, gradient, Hessian plus curvature bounds.

    Subclasses set ``dim``, ``gamma`` (strong convexity, > 0), ``Gamma``
    (Hessian upper bound, >= gamma) and ``psi`` (smoothness, >= gamma),
    and implement the three evaluators. ``constant_hessian`` lets callers
    factorize the Hessian once instead of per evaluation.
    """

    dim: int
    gamma: float
    Gamma: float
    psi: float
    constant_hessian: bool = False

    def value(self, x) -> float:
        raise NotImplementedError

    def gradient(self, x) -> np.ndarray:
        raise NotImplementedError

    def hessian(self, x) -> np.ndarray:
        raise NotImplementedError


class QuadraticObjective(ObjectiveModel):
    """f(x) = (x - a)^T Q (x - a) + offset with Q symmetric positive definite."""

    constant_hessian = True

    def __init__(self, Q, center, offset=0.0):
        Q = np.asarray(Q, dtype=float)
        center = np.asarray(center, dtype=float).ravel()
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise ValidationError(f"Q must be square, got shape {Q.shape}")
        if Q.shape[0] != center.size:
            raise DimensionMismatch(f"Q is {Q.shape} but center has size {center.size}")
        if not np.allclose(Q, Q.T, rtol=0, atol=1e-12):
            raise ValidationError("Q must be symmetric")
        eigvals = np.linalg.eigvalsh(Q)
        if eigvals[0] <= 0:
            raise ValidationError(f"Q must be positive definite (min eigenvalue {eigvals[0]:.3e})")
        self.Q = Q
        self.center = center
        self.offset = float(offset)
        self.dim = center.size
        self.gamma = 2.0 * float(eigvals[0])
        self.Gamma = 2.0 * float(eigvals[-1])
        # psi and Gamma coincide for quadratics; both are kept so the two
        # envelope constants Gamma_max and Psi_max stay distinct objects.
        self.psi = self.Gamma

    @classmethod
    def diagonal(cls, coeffs, center=None, offset=0.0):
        """f(x) = sum_k coeffs[k] * (x_k - center_k)^2."""
        coeffs = np.asarray(coeffs, dtype=float)
        if center is None:
            center = np.zeros_like(coeffs)
        return cls(np.diag(coeffs), center, offset)

    def value(self, x):
        d = np.asarray(x, dtype=float) - self.center
        return float(d @ self.Q @ d) + self.offset

    def gradient(self, x):
        d = np.asarray(x, dtype=float) - self.center
        return 2.0 * (self.Q @ d)

    def hessian(self, x):
        return 2.0 * self.Q


def eval(model: ObjectiveModel, x):
    """Validated (value, gradient, hessian) at ``x``.

    The batched paths in ModelSet skip these checks; this is the
    single-point entry for callers holding untrusted input.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (model.dim,):
        raise DimensionMismatch(f"expected shape ({model.dim},), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise NonFiniteInput(f"evaluation point contains non-finite entries: {x}")
    return model.value(x), model.gradient(x), model.hessian(x)


def convexity_bounds(model: ObjectiveModel):
    """(gamma, Gamma, psi) for the model."""
    return model.gamma, model.Gamma, model.psi


def strong_convexity_property_check(model: ObjectiveModel, x1, x2, slack=1e-9) -> bool:
    """Check gradient monotonicity at (x1, x2) against gamma and Gamma.

    True iff  gamma*||x1-x2||^2 <= [grad f(x1) - grad f(x2)]^T (x1-x2)
    <= Gamma*||x1-x2||^2, each side within ``slack`` (scaled by magnitude).
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if np.array_equal(x1, x2):
        raise ValueError("x1 and x2 must differ")
    inner = float((model.gradient(x1) - model.gradient(x2)) @ (x1 - x2))
    dist2 = float((x1 - x2) @ (x1 - x2))
    tol = slack * max(1.0, dist2)
    return (inner >= model.gamma * dist2 - tol) and (inner <= model.Gamma * dist2 + tol)


def global_minimizer(models, x0=None, tol=1e-10, max_iter=100):
    """Minimizer of sum_i f_i, a diagnostics-only oracle.

    Closed-form linear solve when every model is quadratic, damped Newton
    otherwise. The result always satisfies ||sum_i grad f_i(x*)|| <= tol.
    """
    models = list(models)
    dims = {m.dim for m in models}
    if len(dims) != 1:
        raise DimensionMismatch(f"models disagree on dimension: {sorted(dims)}")
    n = dims.pop()

    if all(isinstance(m, QuadraticObjective) for m in models):
        H = sum(2.0 * m.Q for m in models)
        rhs = sum(2.0 * (m.Q @ m.center) for m in models)
        xstar = np.linalg.solve(H, rhs)
    else:
        xstar = _newton_minimize(models, np.zeros(n) if x0 is None else np.asarray(x0, float),
                                 tol, max_iter)

    residual = np.linalg.norm(sum(m.gradient(xstar) for m in models))
    if residual > tol:
        raise ConvergenceFailure(f"minimizer residual {residual:.3e} > {tol:.1e}")
    return xstar


def _newton_minimize(models, x, tol, max_iter):
    def total_value(z):
        return sum(m.value(z) for m in models)

    def total_gradient(z):
        return sum(m.gradient(z) for m in models)

    value = total_value(x)
    grad = total_gradient(x)
    for _ in range(max_iter):
        if np.linalg.norm(grad) <= tol:
            return x
        hess = sum(m.hessian(x) for m in models)
        step = np.linalg.solve(hess, grad)
        # Step halving guarantees descent on a strongly convex sum.
        accepted = False
        scale = 1.0
        for _ in range(30):
            trial = x - scale * step
            trial_value = total_value(trial)
            if trial_value < value:
                accepted = True
                break
            scale *= 0.5
        if not accepted:
            # Value is at its floating-point floor; the full Newton step
            # still makes progress if it shrinks the gradient.
            trial = x - step
            if np.linalg.norm(total_gradient(trial)) >= np.linalg.norm(grad):
                break
            trial_value = total_value(trial)
        x, value = trial, trial_value
        grad = total_gradient(x)
    if np.linalg.norm(grad) <= tol:
        return x
    raise ConvergenceFailure(f"Newton did not reach ||grad|| <= {tol:.1e} in {max_iter} iterations")


def _batched_cholesky(H):
    """Lower Cholesky factors of a stack of SPD matrices, (N, n, n)."""
    try:
        return np.linalg.cholesky(H)
    except np.linalg.LinAlgError as exc:
        raise SingularHessian(f"Hessian block is not SPD: {exc}") from exc


def _batched_chol_solve(L, b):
    """Solve (L L^T) x = b for each block row; L is (N, n, n), b is (N, n)."""
    n = L.shape[-1]
    y = np.empty_like(b)
    for i in range(n):
        acc = np.einsum("aj,aj->a", L[:, i, :i], y[:, :i]) if i else 0.0
        y[:, i] = (b[:, i] - acc) / L[:, i, i]
    x = np.empty_like(b)
    for i in range(n - 1, -1, -1):
        acc = np.einsum("aj,aj->a", L[:, i + 1 :, i], x[:, i + 1 :]) if i < n - 1 else 0.0
        x[:, i] = (y[:, i] - acc) / L[:, i, i]
    return x


@dataclass(frozen=True)
class ModelSet:
    """Stacked view over one model per agent, with a quadratic fast path.

    The simulation hot loop evaluates all agents at once; when every model
    is quadratic the gradients reduce to one einsum and the (constant)
    Hessian factorization is done once, here, which also surfaces any SPD
    violation eagerly at construction.
    """

    models: tuple

    def __init__(self, models):
        models = tuple(models)
        if not models:
            raise ValidationError("empty model list")
        dims = {m.dim for m in models}
        if len(dims) != 1:
            raise DimensionMismatch(f"models disagree on dimension: {sorted(dims)}")
        object.__setattr__(self, "models", models)
        all_quadratic = all(isinstance(m, QuadraticObjective) for m in models)
        object.__setattr__(self, "_all_quadratic", all_quadratic)
        if all_quadratic:
            object.__setattr__(self, "_Q", np.stack([m.Q for m in models]))
            object.__setattr__(self, "_centers", np.stack([m.center for m in models]))
            object.__setattr__(self, "_offsets", np.array([m.offset for m in models]))
        if all(m.constant_hessian for m in models):
            zero = np.zeros(self.dim)
            hess = np.stack([m.hessian(zero) for m in models])
            object.__setattr__(self, "_const_hessian", hess)
            object.__setattr__(self, "_const_chol", _batched_cholesky(hess))
        else:
            object.__setattr__(self, "_const_hessian", None)
            object.__setattr__(self, "_const_chol", None)

    @property
    def n_agents(self):
        return len(self.models)

    @property
    def dim(self):
        return self.models[0].dim

    @property
    def gammas(self):
        return np.array([m.gamma for m in self.models])

    @property
    def Gammas(self):
        return np.array([m.Gamma for m in self.models])

    @property
    def psis(self):
        return np.array([m.psi for m in self.models])

    def values(self, X):
        """Per-agent values at X (N, n) -> (N,). Accepts (S, N, n) batches."""
        X = np.asarray(X, dtype=float)
        if self._all_quadratic:
            d = X - self._centers
            return np.einsum("...ni,nij,...nj->...n", d, self._Q, d) + self._offsets
        if X.ndim == 2:
            return np.array([m.value(x) for m, x in zip(self.models, X)])
        return np.stack([self.values(Xk) for Xk in X])

    def gradients(self, X):
        """Per-agent gradients at X (N, n) -> (N, n). Accepts (S, N, n) batches."""
        X = np.asarray(X, dtype=float)
        if self._all_quadratic:
            return 2.0 * np.einsum("nij,...nj->...ni", self._Q, X - self._centers)
        if X.ndim == 2:
            return np.stack([m.gradient(x) for m, x in zip(self.models, X)])
        return np.stack([self.gradients(Xk) for Xk in X])

    def hessians(self, X):
        """Per-agent Hessians at X (N, n) -> (N, n, n)."""
        if self._const_hessian is not None:
            return self._const_hessian
        return np.stack([m.hessian(x) for m, x in zip(self.models, np.asarray(X, float))])

    def apply_hessians(self, X, V):
        """Per-agent products H_i(x_i) v_i; V may be (N, n) or (S, N, n)."""
        H = self._const_hessian
        if H is None:
            V = np.asarray(V, dtype=float)
            if V.ndim == 3:
                return np.stack([self.apply_hessians(Xk, Vk) for Xk, Vk in zip(X, V)])
            H = self.hessians(X)
        return np.einsum("nij,...nj->...ni", H, np.asarray(V, dtype=float))

    def solve_hessians(self, X, B):
        """Per-agent SPD solves H_i(x_i) v_i = b_i via Cholesky, (N, n) -> (N, n)."""
        chol = self._const_chol
        if chol is None:
            chol = _batched_cholesky(self.hessians(X))
        return _batched_chol_solve(chol, np.asarray(B, dtype=float))

    def bregman_to(self, X, xref):
        """sum_i [f_i(xref) - f_i(x_i) - grad f_i(x_i)^T (xref - x_i)].

        X may be (N, n) or (S, N, n); xref is a single point (n,). For
        quadratics each term collapses to (xref - x_i)^T Q_i (xref - x_i),
        which avoids the catastrophic cancellation of the three-term form
        once x_i has converged to xref (and is manifestly nonnegative).
        """
        X = np.asarray(X, dtype=float)
        xref = np.asarray(xref, dtype=float)
        if self._all_quadratic:
            d = xref - X
            return np.einsum("...ni,nij,...nj->...", d, self._Q, d)
        vals_ref = self.values(np.broadcast_to(xref, (self.n_agents, self.dim)))
        vals = self.values(X)
        grads = self.gradients(X)
        linear = np.einsum("...ni,...ni->...n", grads, xref - X)
        return np.sum(vals_ref - vals - linear, axis=-1)
