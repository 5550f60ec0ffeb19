"""Shared test helpers: random graphs, oracles, the six-agent benchmark."""

import numpy as np

from ptzgs.graph import Graph, laplacian
from ptzgs.objective import QuadraticObjective


def sec4_objectives():
    """The six two-dimensional quadratics of the benchmark scenario."""
    eye = np.eye(2)
    return [
        QuadraticObjective(eye, [1.0, 2.0]),
        QuadraticObjective(eye, [3.0, 4.0]),
        QuadraticObjective(eye, [5.0, 6.0]),
        QuadraticObjective(np.diag([1.0, 2.0]), [0.0, 0.0]),
        QuadraticObjective(np.diag([2.0, 1.0]), [0.0, 0.0]),
        QuadraticObjective(np.diag([3.0, 2.0]), [0.0, 0.0]),
    ]


SEC4_XSTAR = np.array([1.0, 1.5])


def random_connected_graph(rng, n_max=8, weighted=True):
    """Random spanning tree plus extra edges; connected by construction."""
    n = int(rng.integers(2, n_max + 1))
    w = np.zeros((n, n))

    def weight():
        return float(rng.uniform(0.2, 2.0)) if weighted else 1.0

    order = rng.permutation(n)
    for k in range(1, n):
        i = order[k]
        j = order[int(rng.integers(0, k))]
        w[i, j] = w[j, i] = weight()
    for i in range(n):
        for j in range(i + 1, n):
            if w[i, j] == 0 and rng.random() < 0.3:
                w[i, j] = w[j, i] = weight()
    return Graph(n, w)


def dense_quadratic_form(g, x):
    """Brute-force oracle x^T (L kron I) x via the explicit Kronecker product."""
    x = np.asarray(x, dtype=float)
    blocks = x.reshape(g.n, -1)
    big = np.kron(laplacian(g), np.eye(blocks.shape[1]))
    flat = blocks.ravel()
    return float(flat @ big @ flat)


def random_spd(rng, n, scale=2.0):
    a = rng.normal(size=(n, n))
    return a @ a.T + scale * np.eye(n)
