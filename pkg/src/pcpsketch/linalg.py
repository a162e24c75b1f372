"""Dense linear-algebra kernel.

Matrices are plain 2-D float64 numpy arrays (row-major); this module owns
the SVD with relative-rank truncation, head/tail spectral splits, the tail
index used by the spectral certificate, projection costs, and seeded
random subspaces.  Everything here is deterministic for fixed inputs
within a build.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionError,
    InvalidInputError,
    InvalidMatrixError,
    InvalidRankError,
)
from .rng import Stream, rng_for

__all__ = [
    "SvdFactorization",
    "HeadTailSplit",
    "Projection",
    "PROJECTION_KINDS",
    "as_matrix",
    "frob2",
    "svd",
    "head_tail_split",
    "tail_index_p",
    "projection_cost",
    "haar_subspace",
    "orthonormal_columns",
]

PROJECTION_KINDS = frozenset(
    [
        "random-subspace",
        "top-singular-of-A",
        "top-singular-of-sketch",
        "cluster-indicator",
        "basis-axes",
        "custom",
    ]
)


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and return `a` as a 2-D float64 array with finite entries."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise InvalidMatrixError(f"{name} must be 2-D, got ndim={a.ndim}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise InvalidMatrixError(f"{name} must have positive dimensions, got {a.shape}")
    if not np.isfinite(a).all():
        raise InvalidMatrixError(f"{name} contains non-finite entries")
    return a


def frob2(a) -> float:
    """Squared Frobenius norm."""
    a = np.asarray(a, dtype=float)
    return float(np.sum(a * a))


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SvdFactorization:
    """Truncated thin SVD: ``u @ diag(sigma) @ v.T`` reconstructs the input.

    ``sigma`` holds the strictly positive singular values, non-increasing;
    columns beyond ``rank`` were dropped by the relative truncation rule
    ``sigma_i > tol * sigma_1``.
    """

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray
    rank: int
    tol: float

    def __post_init__(self):
        object.__setattr__(self, "u", _readonly(self.u))
        object.__setattr__(self, "sigma", _readonly(self.sigma))
        object.__setattr__(self, "v", _readonly(self.v))


@dataclass(frozen=True)
class HeadTailSplit:
    """Split of a matrix into its best rank-``r`` part and the remainder.

    ``head + tail`` equals the original matrix entrywise by construction;
    ``r`` is the effective split rank, ``min(requested r, rank)``.
    """

    r: int
    head: np.ndarray
    tail: np.ndarray
    u_r: np.ndarray
    v_r: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "head", _readonly(self.head))
        object.__setattr__(self, "tail", _readonly(self.tail))
        object.__setattr__(self, "u_r", _readonly(self.u_r))
        object.__setattr__(self, "v_r", _readonly(self.v_r))


@dataclass(frozen=True)
class Projection:
    """Orthogonal projection onto the span of ``basis`` (orthonormal columns).

    The matrix never materializes as n x n; costs use the basis directly.
    A zero-column basis is the rank-0 projection.
    """

    basis: np.ndarray
    kind: str = "custom"

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=float)
        if basis.ndim != 2:
            raise InvalidMatrixError("projection basis must be 2-D")
        if not np.isfinite(basis).all():
            raise InvalidMatrixError("projection basis contains non-finite entries")
        if self.kind not in PROJECTION_KINDS:
            raise InvalidInputError(f"unknown projection kind {self.kind!r}")
        if basis.shape[1] > 0:
            gram = basis.T @ basis
            if np.max(np.abs(gram - np.eye(basis.shape[1]))) > 1e-8:
                raise InvalidMatrixError("projection basis columns are not orthonormal")
        object.__setattr__(self, "basis", _readonly(basis))

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    def apply(self, a: np.ndarray) -> np.ndarray:
        """P @ a for a matrix with matching row count."""
        a = as_matrix(a)
        if a.shape[0] != self.basis.shape[0]:
            raise DimensionError(
                f"projection on {self.basis.shape[0]} rows applied to {a.shape[0]}"
            )
        if self.basis.shape[1] == 0:
            return np.zeros_like(a)
        return self.basis @ (self.basis.T @ a)


def svd(a, tol: float = 1e-10) -> SvdFactorization:
    """Thin SVD truncated at relative tolerance ``tol``.

    Parameters
    ----------
    a : array_like, shape (n, d)
        Input matrix; all entries finite.
    tol : float in [0, 1)
        Singular values ``sigma_i <= tol * sigma_1`` are treated as zero.

    Returns
    -------
    SvdFactorization
        Factors with exactly ``rank`` columns / entries kept.
    """
    a = as_matrix(a)
    if not 0.0 <= tol < 1.0:
        raise InvalidInputError(f"tol must be in [0, 1), got {tol}")
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] <= 0.0:
        rank = 0
    else:
        rank = int(np.sum(s > tol * s[0]))
    return SvdFactorization(u[:, :rank], s[:rank], vt[:rank].T, rank, tol)


def head_tail_split(fact: SvdFactorization, m_original, r: int) -> HeadTailSplit:
    """Split ``m_original`` into its best rank-``r`` approximation and the rest.

    ``head`` is the projection of the matrix onto its top-``r`` left singular
    subspace, so ``head + tail == m_original`` exactly and the split is
    orthogonal up to floating point.  ``r`` past the rank clamps: head is the
    whole matrix, tail is zero.
    """
    m = as_matrix(m_original)
    if r < 0:
        raise InvalidRankError(f"split rank must be >= 0, got {r}")
    r_eff = min(int(r), fact.rank)
    u_r = fact.u[:, :r_eff]
    v_r = fact.v[:, :r_eff]
    head = u_r @ (u_r.T @ m)
    tail = m - head
    return HeadTailSplit(r_eff, head, tail, u_r, v_r)


def tail_index_p(fact: SvdFactorization, k: int) -> int:
    """Largest index p with ``sigma_p^2 >= |A - A_k|_F^2 / k`` (ties included).

    Returns ``rank`` when the rank-k residual is exactly zero.  Whenever the
    residual is nonzero, p <= 2k.
    """
    if k < 1:
        raise InvalidRankError(f"k must be >= 1, got {k}")
    sigma2 = fact.sigma * fact.sigma
    tail2 = float(np.sum(sigma2[k:]))
    if tail2 <= 0.0:
        return fact.rank
    return int(np.sum(sigma2 >= tail2 / k))


def projection_cost(a, p: Projection) -> float:
    """Squared Frobenius distance from ``a`` to its projection, ``|a - P a|_F^2``.

    Computed as ``|a|_F^2 - |Q^T a|_F^2`` (Pythagoras), clamped at zero.
    """
    a = as_matrix(a)
    q = p.basis
    if q.shape[0] != a.shape[0]:
        raise DimensionError(f"projection on {q.shape[0]} rows, matrix has {a.shape[0]}")
    cost = frob2(a) - frob2(q.T @ a)
    return max(cost, 0.0)


def orthonormal_columns(g, rng: np.random.Generator | None = None) -> np.ndarray:
    """Orthonormalize the columns of ``g`` by modified Gram-Schmidt.

    One re-orthogonalization pass keeps the result orthonormal to machine
    precision.  A numerically dependent column is redrawn from ``rng`` when
    one is supplied, otherwise it is an error.
    """
    q = np.array(g, dtype=float, copy=True)
    if q.ndim != 2 or q.shape[1] > q.shape[0]:
        raise InvalidMatrixError("need a tall 2-D array to orthonormalize")
    n = q.shape[0]
    floor = 1e-12 * np.sqrt(n)
    for j in range(q.shape[1]):
        for attempt in range(50):
            v = q[:, j]
            for _ in range(2):
                if j > 0:
                    v = v - q[:, :j] @ (q[:, :j].T @ v)
            norm = float(np.linalg.norm(v))
            if norm > floor:
                q[:, j] = v / norm
                break
            if rng is None:
                raise InvalidInputError("columns are numerically dependent")
            q[:, j] = rng.standard_normal(n)
        else:
            raise InvalidInputError("could not orthonormalize column")
    return q


def haar_subspace(n: int, k: int, seed: int = 0) -> Projection:
    """Rank-``k`` projection onto a Haar-random subspace of R^n.

    The basis is the modified Gram-Schmidt orthonormalization of an n x k
    standard-normal draw; deterministic per seed.
    """
    if not 1 <= k <= n:
        raise InvalidRankError(f"need 1 <= k <= n, got k={k}, n={n}")
    rng = rng_for(seed, Stream.HAAR)
    basis = orthonormal_columns(rng.standard_normal((n, k)), rng)
    return Projection(basis, kind="random-subspace")
