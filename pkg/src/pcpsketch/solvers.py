"""Downstream solvers evaluated on sketches.

k-means (seeded Lloyd and an exhaustive brute-force oracle for small n),
best rank-k projections, and the sketch-and-solve driver that solves on
the compressed matrix and evaluates the solution on the original.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import InvalidInputError, InvalidRankError, TooLargeError
from .linalg import Projection, as_matrix, frob2, projection_cost, svd
from .rng import Stream, rng_for
from .sketch import Sketch

__all__ = [
    "Clustering",
    "SolveResult",
    "best_rank_k_projection",
    "cluster_indicator_projection",
    "kmeans_cost",
    "lloyd_kmeans",
    "partitions",
    "exhaustive_kmeans",
    "sketch_and_solve",
]


@dataclass(frozen=True)
class Clustering:
    """Row clustering with its k-means objective value."""

    assignment: np.ndarray
    k: int
    cost: float

    def __post_init__(self):
        a = np.asarray(self.assignment, dtype=np.int64)
        if a.ndim != 1 or a.size == 0:
            raise InvalidInputError("assignment must be a nonempty 1-D array")
        if a.min() < 0 or a.max() >= self.k:
            raise InvalidInputError("cluster labels out of range")
        object.__setattr__(self, "assignment", a)
        a.setflags(write=False)


@dataclass(frozen=True)
class SolveResult:
    """Solution found on the sketch, with costs on both matrices.

    ``certified_ratio`` is the guaranteed approximation factor
    (1 + eps) * gamma / (1 - eps) carried over from the sketch guarantee;
    None when the inner solver certifies no gamma (Lloyd).
    """

    solution: object
    projection: Projection
    cost_on_a: float
    cost_on_sketch: float
    certified_ratio: float | None
    gamma: float | None
    task: str


def best_rank_k_projection(m, k: int, kind: str = "top-singular-of-A") -> Projection:
    """Projection onto the top-k left singular subspace of ``m``."""
    m = as_matrix(m)
    if k < 1:
        raise InvalidRankError(f"k must be >= 1, got {k}")
    fact = svd(m)
    return Projection(fact.u[:, : min(k, fact.rank)], kind=kind)


def cluster_indicator_projection(assignment, k: int, n: int) -> Projection:
    """Normalized cluster-indicator projection for a row clustering.

    One column per nonempty cluster, constant 1/sqrt(|C_j|) on its members;
    empty clusters are dropped, so the rank can fall below k.
    """
    assignment = np.asarray(assignment, dtype=np.int64)
    if assignment.shape != (n,):
        raise InvalidInputError(f"assignment must have shape ({n},)")
    if k < 1:
        raise InvalidRankError(f"k must be >= 1, got {k}")
    if assignment.min() < 0 or assignment.max() >= k:
        raise InvalidInputError("cluster labels out of range")
    cols = []
    for j in range(k):
        members = assignment == j
        size = int(members.sum())
        if size == 0:
            continue
        col = np.zeros(n)
        col[members] = 1.0 / np.sqrt(size)
        cols.append(col)
    basis = np.column_stack(cols) if cols else np.zeros((n, 0))
    return Projection(basis, kind="cluster-indicator")


def kmeans_cost(m, assignment) -> float:
    """Sum of squared distances of rows to their cluster means."""
    m = as_matrix(m)
    assignment = np.asarray(assignment, dtype=np.int64)
    if assignment.shape != (m.shape[0],):
        raise InvalidInputError("assignment length must match row count")
    cost = 0.0
    for j in np.unique(assignment):
        rows = m[assignment == j]
        cost += frob2(rows - rows.mean(axis=0))
    return cost


def _plusplus_init(m: np.ndarray, k: int, rng) -> np.ndarray:
    n = m.shape[0]
    centers = np.empty((k, m.shape[1]))
    first = int(rng.integers(n))
    centers[0] = m[first]
    d2 = np.sum((m - centers[0]) ** 2, axis=1)
    for j in range(1, k):
        total = float(d2.sum())
        if total <= 0.0:
            choice = int(rng.integers(n))
        else:
            choice = int(rng.choice(n, p=d2 / total))
        centers[j] = m[choice]
        d2 = np.minimum(d2, np.sum((m - centers[j]) ** 2, axis=1))
    return centers


def lloyd_kmeans(m, k: int, iters: int = 50, seed: int = 0, trace: list | None = None) -> Clustering:
    """Lloyd's algorithm with k-means++ seeding; deterministic per seed.

    Empty clusters are reseeded with the point farthest from its current
    center, so the objective never increases across iterations (appended to
    ``trace`` when a list is passed).
    """
    m = as_matrix(m)
    n = m.shape[0]
    if k < 1:
        raise InvalidRankError(f"k must be >= 1, got {k}")
    if n < k:
        raise InvalidInputError(f"need at least k={k} rows, got {n}")
    if iters < 1:
        raise InvalidInputError(f"iters must be >= 1, got {iters}")
    rng = rng_for(seed, Stream.LLOYD)
    centers = _plusplus_init(m, k, rng)
    assignment = np.zeros(n, dtype=np.int64)
    for _ in range(iters):
        d2 = ((m[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_assignment = np.argmin(d2, axis=1)
        point_d2 = d2[np.arange(n), new_assignment]
        for j in range(k):
            if not (new_assignment == j).any():
                far = int(np.argmax(point_d2))
                new_assignment[far] = j
                point_d2[far] = 0.0
        if trace is not None:
            trace.append(kmeans_cost(m, new_assignment))
        unchanged = np.array_equal(new_assignment, assignment)
        assignment = new_assignment
        for j in range(k):
            members = assignment == j
            if members.any():
                centers[j] = m[members].mean(axis=0)
        if unchanged:
            break
    return Clustering(assignment, k, kmeans_cost(m, assignment))


def partitions(n: int, max_blocks: int) -> Iterator[tuple[int, ...]]:
    """All partitions of range(n) into at most ``max_blocks`` nonempty blocks.

    Yielded as restricted growth strings (canonical labels), in lexicographic
    order.
    """
    if n < 1:
        raise InvalidInputError(f"n must be >= 1, got {n}")
    if max_blocks < 1:
        raise InvalidInputError(f"max_blocks must be >= 1, got {max_blocks}")
    labels = [0] * n

    def rec(i: int, used: int):
        if i == n:
            yield tuple(labels)
            return
        top = min(used + 1, max_blocks)
        for lab in range(top):
            labels[i] = lab
            yield from rec(i + 1, max(used, lab + 1))

    yield from rec(1, 1)


def exhaustive_kmeans(m, k: int) -> Clustering:
    """Globally optimal k-means over all partitions into at most k clusters.

    Capped at n <= 12 rows (Bell(12) is about 4.2 million partitions); cost
    ties keep the lexicographically smallest assignment.  Uses a subset-Gram
    table so each partition costs O(k) to score.
    """
    m = as_matrix(m)
    n = m.shape[0]
    if k < 1:
        raise InvalidRankError(f"k must be >= 1, got {k}")
    if n > 12:
        raise TooLargeError(f"exhaustive search capped at 12 rows, got {n}")
    gram = m @ m.T
    total = float(np.trace(gram))
    # q[T] = sum of gram over the index pairs of subset T, built by low-bit DP
    size = 1 << n
    q = np.zeros(size)
    dots = [np.zeros(size) for _ in range(n)]
    for i in range(n):
        di = dots[i]
        gi = gram[i]
        for t in range(1, size):
            low = t & -t
            j = low.bit_length() - 1
            di[t] = di[t ^ low] + gi[j]
    for t in range(1, size):
        low = t & -t
        i = low.bit_length() - 1
        prev = t ^ low
        q[t] = q[prev] + gram[i, i] + 2.0 * dots[i][prev]
    popcount = np.zeros(size, dtype=np.int64)
    for t in range(1, size):
        popcount[t] = popcount[t >> 1] + (t & 1)

    best_explained = -1.0
    best = None
    masks = [0] * k
    labels = [0] * n

    def rec(i: int, used: int):
        nonlocal best_explained, best
        if i == n:
            explained = 0.0
            for j in range(used):
                t = masks[j]
                explained += q[t] / popcount[t]
            if explained > best_explained + 1e-12 * (abs(total) + 1.0):
                best_explained = explained
                best = tuple(labels)
            return
        top = min(used + 1, k)
        bit = 1 << i
        for lab in range(top):
            labels[i] = lab
            masks[lab] |= bit
            rec(i + 1, max(used, lab + 1))
            masks[lab] &= ~bit

    labels[0] = 0
    masks[0] = 1
    rec(1, 1)
    assignment = np.array(best, dtype=np.int64)
    return Clustering(assignment, k, kmeans_cost(m, assignment))


def sketch_and_solve(
    a,
    sk: Sketch,
    task: str,
    solver: str = "exhaustive",
    iters: int = 50,
    seed: int = 0,
) -> SolveResult:
    """Solve ``task`` on the sketch, evaluate the solution on ``a``.

    For "lowrank" the solution is the top-k subspace of the sketch (gamma 1);
    for "kmeans" rows of the sketch are clustered exhaustively (gamma 1) or
    with Lloyd (no certified gamma).  The certified ratio, when gamma is
    known, is (1 + eps) * gamma / (1 - eps).
    """
    a = as_matrix(a)
    at = sk.a_tilde
    if at.shape[0] != a.shape[0]:
        raise InvalidInputError("sketch row count does not match the matrix")
    k, eps = sk.params.k, sk.params.eps
    if task == "lowrank":
        proj = best_rank_k_projection(at, k, kind="top-singular-of-sketch")
        solution: object = proj
        gamma: float | None = 1.0
    elif task == "kmeans":
        if solver == "exhaustive":
            clustering = exhaustive_kmeans(at, k)
            gamma = 1.0
        elif solver == "lloyd":
            clustering = lloyd_kmeans(at, k, iters=iters, seed=seed)
            gamma = None
        else:
            raise InvalidInputError(f"unknown solver {solver!r}")
        proj = cluster_indicator_projection(clustering.assignment, k, a.shape[0])
        solution = clustering
    else:
        raise InvalidInputError(f"unknown task {task!r}")
    ratio = (1.0 + eps) * gamma / (1.0 - eps) if gamma is not None else None
    return SolveResult(
        solution=solution,
        projection=proj,
        cost_on_a=projection_cost(a, proj),
        cost_on_sketch=projection_cost(at, proj),
        certified_ratio=ratio,
        gamma=gamma,
        task=task,
    )
