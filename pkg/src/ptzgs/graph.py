"""Weighted undirected communication graphs and their Laplacian spectra.

Agent networks are small (tens of nodes), so everything is dense numpy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceFailure, DimensionMismatch, DisconnectedGraph, ValidationError

# Zero-eigenvalue / connectivity tolerance. Double-precision symmetric
# eigensolvers resolve the kernel to ~1e-12 at these sizes.
TOL_EIG = 1e-9


@dataclass(frozen=True)
class Graph:
    """Undirected weighted graph on ``n`` agents.

    ``weights`` is the symmetric nonnegative adjacency matrix with zero
    diagonal; entry (i, j) is the coupling weight between agents i and j.
    """

    n: int
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        if self.n < 2:
            raise ValidationError(f"need at least 2 agents, got n={self.n}")
        if w.shape != (self.n, self.n):
            raise ValidationError(f"weight matrix shape {w.shape} != ({self.n}, {self.n})")
        if not np.all(np.isfinite(w)):
            raise ValidationError("weights contain non-finite entries")
        if np.any(w < 0):
            raise ValidationError("weights must be nonnegative")
        if np.any(np.diag(w) != 0):
            raise ValidationError("self-loops are not allowed (nonzero diagonal)")
        if not np.array_equal(w, w.T):
            raise ValidationError("weight matrix must be symmetric")
        w.setflags(write=False)

    @classmethod
    def from_edges(cls, n, edges):
        """Build a graph from 1-based ``(i, j)`` or ``(i, j, weight)`` tuples.

        Omitted weights default to 1.0. Self-loops and duplicate edges are
        rejected.
        """
        w = np.zeros((n, n))
        seen = set()
        for edge in edges:
            if len(edge) == 2:
                i, j = edge
                weight = 1.0
            elif len(edge) == 3:
                i, j, weight = edge
            else:
                raise ValidationError(f"edge {edge!r} must be (i, j) or (i, j, weight)")
            if not (1 <= i <= n and 1 <= j <= n):
                raise ValidationError(f"edge ({i}, {j}) out of range for n={n}")
            if i == j:
                raise ValidationError(f"self-loop ({i}, {j}) rejected")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValidationError(f"duplicate edge ({i}, {j}) rejected")
            seen.add(key)
            w[i - 1, j - 1] = w[j - 1, i - 1] = float(weight)
        return cls(n, w)

    def neighbors(self, i):
        """0-based neighbor indices of agent ``i``."""
        return np.flatnonzero(self.weights[i] > 0)


def ring_graph(n, weight=1.0):
    """Cycle 1-2-...-n-1 with uniform edge weight."""
    edges = [(i, i % n + 1, weight) for i in range(1, n + 1)]
    return Graph.from_edges(n, edges)


def path_graph(n, weight=1.0):
    """Path 1-2-...-n with uniform edge weight."""
    return Graph.from_edges(n, [(i, i + 1, weight) for i in range(1, n)])


def complete_graph(n, weight=1.0):
    """All-to-all graph with uniform edge weight."""
    edges = [(i, j, weight) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    return Graph.from_edges(n, edges)


@dataclass(frozen=True)
class SpectralInfo:
    """Laplacian matrix with its ascending eigenvalues."""

    laplacian: np.ndarray
    eigenvalues: np.ndarray = field(repr=False)

    @property
    def lambda2(self):
        """Fiedler value: second-smallest Laplacian eigenvalue."""
        return float(self.eigenvalues[1])

    @property
    def lambda_max(self):
        return float(self.eigenvalues[-1])


def laplacian(g: Graph) -> np.ndarray:
    """Graph Laplacian L = D - A (symmetric, zero row sums)."""
    degrees = g.weights.sum(axis=1)
    return np.diag(degrees) - g.weights


def spectrum(g: Graph) -> SpectralInfo:
    """Laplacian together with its eigenvalues in ascending order."""
    lap = laplacian(g)
    try:
        eigvals = np.linalg.eigvalsh(lap)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"symmetric eigensolver failed: {exc}") from exc
    return SpectralInfo(laplacian=lap, eigenvalues=eigvals)


def assert_connected(g: Graph, tol: float = TOL_EIG) -> SpectralInfo:
    """Raise DisconnectedGraph unless the Fiedler value exceeds ``tol``.

    Returns the spectrum so callers do not have to recompute it.
    """
    info = spectrum(g)
    if info.lambda2 <= tol:
        raise DisconnectedGraph(
            f"graph is not connected: lambda2 = {info.lambda2:.3e} <= {tol:.1e}"
        )
    return info


def consensus_quadratic_form(g: Graph, x) -> float:
    """Disagreement energy x^T (L (x) I_n) x for stacked agent vectors.

    ``x`` is an (N, n) array of per-agent blocks, or a flat vector whose
    length is a multiple of N. Computed as the pairwise sum
    (1/2) sum_ij a_ij ||x_i - x_j||^2, which is the numerically benign form.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        if x.size % g.n != 0:
            raise DimensionMismatch(f"flat vector of size {x.size} not divisible by N={g.n}")
        x = x.reshape(g.n, -1)
    elif x.ndim != 2 or x.shape[0] != g.n:
        raise DimensionMismatch(f"expected ({g.n}, n) blocks, got shape {x.shape}")
    diffs = x[:, None, :] - x[None, :, :]
    sq = np.einsum("ijk,ijk->ij", diffs, diffs)
    return 0.5 * float(np.sum(g.weights * sq))


def complete_graph_laplacian(n: int) -> np.ndarray:
    """Laplacian of the unit-weight complete graph: n*I - 1*1^T."""
    if n < 2:
        raise ValidationError(f"need n >= 2, got {n}")
    return n * np.eye(n) - np.ones((n, n))
