"""Normalized-cut bipartition of a weighted graph.

The relaxation follows the classic recipe: eigenvector of the second-smallest
eigenvalue of the symmetric normalized Laplacian, mapped back through
D^(-1/2), then an exhaustive sweep over the n-1 thresholds between
consecutive sorted entries picks the split with the smallest true Ncut.
A dense solver is used throughout; the graphs are small (hundreds to a few
thousand nodes) and dense eigensolvers need no convergence tuning.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, InputError
from .graph import WeightedGraph


@dataclass(frozen=True)
class Bipartition:
    """An unordered two-way split; group_a holds the smallest node id."""

    group_a: frozenset[int]
    group_b: frozenset[int]
    ncut: float


def ncut_value(graph: WeightedGraph, a, b) -> float:
    """Ncut(A, B) = cut(A,B)/assoc(A,V) + cut(A,B)/assoc(B,V)."""
    a_idx = np.asarray(sorted(a), dtype=np.int64)
    b_idx = np.asarray(sorted(b), dtype=np.int64)
    n = graph.n
    if a_idx.size == 0 or b_idx.size == 0:
        raise DegenerateInputError("both sides of a bipartition must be non-empty")
    marks = np.zeros(n, dtype=np.int64)
    marks[a_idx] += 1
    marks[b_idx] += 1
    if a_idx.size + b_idx.size != n or np.any(marks != 1):
        raise InputError("A and B must partition the node set exactly")
    w = graph.weights
    cut = float(w[np.ix_(a_idx, b_idx)].sum())
    assoc_a = float(w[a_idx, :].sum())
    assoc_b = float(w[b_idx, :].sum())
    if assoc_a == 0.0 or assoc_b == 0.0:
        raise DegenerateInputError("a side has zero association; ncut undefined")
    return cut / assoc_a + cut / assoc_b


def smallest_eigenpairs(matrix, k: int) -> tuple[np.ndarray, np.ndarray]:
    """The k smallest eigenvalues (ascending) and orthonormal eigenvectors of
    a symmetric matrix. Symmetry is required within 1e-9."""
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError("matrix must be square")
    n = m.shape[0]
    if not 1 <= k <= n:
        raise InputError(f"k must be in 1..{n}, got {k}")
    if n and float(np.abs(m - m.T).max()) > 1e-9:
        raise InputError("matrix is not symmetric within 1e-9")
    vals, vecs = np.linalg.eigh(m)
    return vals[:k], vecs[:, :k]


def _components(w: np.ndarray) -> list[list[int]]:
    """Connected components of the nonzero-weight graph, each sorted, ordered
    by their smallest member."""
    n = w.shape[0]
    adj = w > 0.0
    seen = np.zeros(n, dtype=bool)
    comps: list[list[int]] = []
    for start in range(n):
        if seen[start]:
            continue
        seen[start] = True
        frontier = np.array([start])
        comp = [start]
        while frontier.size:
            reach = adj[frontier].any(axis=0) & ~seen
            frontier = np.nonzero(reach)[0]
            seen |= reach
            comp.extend(frontier.tolist())
        comps.append(sorted(comp))
    return comps


def _canonical(split_a: list[int], split_b: list[int]) -> tuple[frozenset[int], frozenset[int]]:
    if min(split_a) < min(split_b):
        return frozenset(split_a), frozenset(split_b)
    return frozenset(split_b), frozenset(split_a)


def ncut_bipartition(graph: WeightedGraph) -> Bipartition:
    """Best two-way split of a graph with at least 2 nodes.

    A disconnected graph splits into its smallest component versus the rest
    (ncut 0). Otherwise the Fiedler sweep runs, with ties resolved toward the
    more balanced split and then the lexicographically lower id set. The
    returned ncut is recomputed exactly from the chosen groups.
    """
    n = graph.n
    if n < 2:
        raise DegenerateInputError("need at least 2 nodes to bipartition")
    w = graph.weights
    comps = _components(w)
    if len(comps) > 1:
        smallest = min(comps, key=lambda c: (len(c), c[0]))
        rest = sorted(i for i in range(n) if i not in set(smallest))
        a, b = _canonical(smallest, rest)
        return Bipartition(a, b, 0.0)

    # Connected with >= 2 nodes, so every degree is positive.
    deg = w.sum(axis=1)
    dinv = 1.0 / np.sqrt(deg)
    norm_w = w * np.multiply.outer(dinv, dinv)
    lap = np.eye(n) - norm_w
    _, vecs = smallest_eigenpairs(lap, 2)
    x = dinv * vecs[:, 1]

    order = np.argsort(x, kind="stable")
    ws = w[order][:, order]
    deg_s = deg[order]
    cum_deg = np.cumsum(deg_s)
    total = cum_deg[-1]
    # within[k]: total weight (both directions) among the first k+1 sorted nodes.
    row_in = np.tril(ws, -1).sum(axis=1)
    within = 2.0 * np.cumsum(row_in)
    assoc_a = cum_deg[:-1]
    assoc_b = total - assoc_a
    cut = np.maximum(assoc_a - within[:-1], 0.0)
    ncuts = cut / assoc_a + cut / assoc_b

    best = ncuts.min()
    tied = np.nonzero(ncuts == best)[0]
    if tied.size == 1:
        k = int(tied[0])
    else:
        ranked = []
        for cand in tied.tolist():
            size_a = cand + 1
            balance = min(size_a, n - size_a)
            side = sorted(order[: cand + 1].tolist())
            if 0 not in side:
                side = sorted(order[cand + 1 :].tolist())
            ranked.append((-balance, tuple(side), cand))
        ranked.sort()
        k = ranked[0][2]

    a, b = _canonical(sorted(order[: k + 1].tolist()), sorted(order[k + 1 :].tolist()))
    return Bipartition(a, b, ncut_value(graph, a, b))
