"""Error functionals and sufficient-condition certificates.

The four functionals measure exactly how far an operator S is from
preserving the quantities that drive projection costs: subspace embedding
on a row space, approximate matrix multiplication, Frobenius mass, and a
regularized spectral sandwich on A A^T.  Two certifiers bundle them into
checkable sufficient conditions for the cost-preservation guarantee at a
given (k, eps): one through matrix-approximation conditions on the rank-k
head and tail, one through the regularized spectral route.  Certificates
never have false positives up to floating point; they may be conservative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionError,
    InvalidInputError,
    InvalidRankError,
    UnsupportedFamilyError,
    ZeroMatrixError,
)
from .linalg import as_matrix, frob2, head_tail_split, svd, tail_index_p
from .rng import Stream, rng_for

__all__ = [
    "Certificate",
    "JlMomentEstimate",
    "HOLDS_TOL",
    "subspace_embedding_error",
    "amm_error",
    "frobenius_preservation_error",
    "spectral_approx_error",
    "certify_matrix_approx",
    "certify_spectral",
    "jl_moment_estimate",
]

# slack added to every threshold comparison, absorbing float rounding only
HOLDS_TOL = 1e-12


@dataclass(frozen=True)
class Certificate:
    """Outcome of a sufficient-condition check.

    ``theorem`` is the wire-format route tag ("T1" matrix-approximation,
    "T2" spectral).  ``holds`` is true iff every measured value named in
    ``thresholds`` is at most its threshold plus ``HOLDS_TOL``; extra
    entries in ``measured`` (like the regularizer used) are informational.
    """

    theorem: str
    measured: dict
    thresholds: dict
    holds: bool


@dataclass(frozen=True)
class JlMomentEstimate:
    """Monte-Carlo estimate of E |x^T S|_2^2 - 1|^ell for a unit vector x."""

    ell: int
    trials: int
    estimate: float
    stderr: float


def _check_operator(m: np.ndarray, s) -> np.ndarray:
    s = as_matrix(s, "operator")
    if s.shape[0] != m.shape[1]:
        raise DimensionError(
            f"operator has {s.shape[0]} rows, matrix has {m.shape[1]} columns"
        )
    return s


def subspace_embedding_error(m, s) -> float:
    """Worst relative squared-norm distortion of S over the row space of ``m``.

    Equals |V^T S S^T V - I|_2 for V an orthonormal basis of the row space;
    computed exactly by a symmetric eigensolve.  Zero matrix is an error.
    """
    m = as_matrix(m)
    s = _check_operator(m, s)
    fact = svd(m)
    if fact.rank == 0:
        raise ZeroMatrixError("subspace embedding error undefined for the zero matrix")
    w = fact.v.T @ s
    g = w @ w.T
    return float(np.max(np.abs(np.linalg.eigvalsh(g - np.eye(fact.rank)))))


def amm_error(m, n, s) -> float:
    """Normalized product error  |M N - M S S^T N|_F / (|M|_F |N|_F).

    Zero when either factor is zero.
    """
    m = as_matrix(m, "m")
    n = as_matrix(n, "n")
    if m.shape[1] != n.shape[0]:
        raise DimensionError(f"inner dimensions differ: {m.shape[1]} vs {n.shape[0]}")
    s = _check_operator(m, s)
    denom = math.sqrt(frob2(m)) * math.sqrt(frob2(n))
    if denom == 0.0:
        return 0.0
    diff = m @ n - (m @ s) @ (s.T @ n)
    return math.sqrt(frob2(diff)) / denom


def frobenius_preservation_error(m, s) -> float:
    """Relative loss of squared Frobenius mass, | |M|_F^2 - |M S|_F^2 | / |M|_F^2."""
    m = as_matrix(m)
    s = _check_operator(m, s)
    total = frob2(m)
    if total == 0.0:
        return 0.0
    return abs(total - frob2(m @ s)) / total


def spectral_approx_error(a, s, lam: float) -> float:
    """Smallest eps' >= 0 with (1-eps') A A^T - lam I <= A S S^T A^T <= (1+eps') A A^T + lam I.

    The sandwich binds only on the column space of A, where it reduces to
    two symmetric eigenproblems in the SVD basis; solved exactly.
    """
    a = as_matrix(a)
    s = _check_operator(a, s)
    if lam < 0.0 or not math.isfinite(lam):
        raise InvalidInputError(f"lam must be finite and >= 0, got {lam}")
    fact = svd(a)
    if fact.rank == 0:
        raise ZeroMatrixError("spectral approximation error undefined for the zero matrix")
    sigma = fact.sigma
    w = fact.v.T @ s
    g = w @ w.T
    # D = U^T (A S S^T A^T - A A^T) U restricted to the column space
    d_r = sigma[:, None] * g * sigma[None, :]
    np.fill_diagonal(d_r, np.diagonal(d_r) - sigma * sigma)
    scale = np.outer(sigma, sigma)
    lam_eye = lam * np.eye(fact.rank)
    hi = float(np.max(np.linalg.eigvalsh((d_r - lam_eye) / scale)))
    lo = float(np.max(np.linalg.eigvalsh((-d_r - lam_eye) / scale)))
    return max(0.0, hi, lo)


def _holds(measured: dict, thresholds: dict) -> bool:
    return all(measured[name] <= thresholds[name] + HOLDS_TOL for name in thresholds)


def certify_matrix_approx(a, s, k: int, eps: float) -> Certificate:
    """Sufficient conditions on S via matrix-approximation primitives.

    Measures the subspace embedding error on the rank-k head, two product
    errors involving the tail, and the tail Frobenius preservation; if all
    four fall under their budgets (eps/3, eps/(6 sqrt k) twice, eps/6), then
    A S preserves every rank-<=k projection cost within relative eps with a
    zero additive constant.
    """
    a = as_matrix(a)
    s = _check_operator(a, s)
    if k < 1:
        raise InvalidRankError(f"k must be >= 1, got {k}")
    if not 0.0 < eps < 1.0:
        raise InvalidInputError(f"eps must be in (0, 1), got {eps}")
    fact = svd(a)
    split = head_tail_split(fact, a, k)
    if fact.rank == 0:
        se = amm_tt = amm_tv = frob_t = 0.0
    elif fact.rank <= k:
        # tail is structurally zero
        se = subspace_embedding_error(split.head, s)
        amm_tt = amm_tv = frob_t = 0.0
    else:
        se = subspace_embedding_error(split.head, s)
        amm_tt = amm_error(split.tail, split.tail.T, s)
        amm_tv = amm_error(split.tail, split.v_r, s)
        frob_t = frobenius_preservation_error(split.tail, s)
    measured = {
        "se_err": se,
        "amm_tail_tail": amm_tt,
        "amm_tail_vk": amm_tv,
        "frob_tail": frob_t,
    }
    cross_budget = eps / (6.0 * math.sqrt(k))
    thresholds = {
        "se_err": eps / 3.0,
        "amm_tail_tail": cross_budget,
        "amm_tail_vk": cross_budget,
        "frob_tail": eps / 6.0,
    }
    return Certificate("T1", measured, thresholds, _holds(measured, thresholds))


def certify_spectral(a, s, k: int, eps: float) -> Certificate:
    """Sufficient conditions on S via the regularized spectral route.

    Uses the regularizer lam = eps |A - A_k|_F^2 / (24 k) and the tail index
    p (largest index whose squared singular value reaches the mean tail
    mass |A - A_k|_F^2 / k).  Requires the spectral sandwich within eps/24
    and Frobenius preservation of the rank-p tail within
    (eps/12) |A - A_k|_F^2 / |A - A_p|_F^2; the p-tail condition is vacuous
    when that tail is zero.
    """
    a = as_matrix(a)
    s = _check_operator(a, s)
    if k < 1:
        raise InvalidRankError(f"k must be >= 1, got {k}")
    if not 0.0 < eps < 1.0:
        raise InvalidInputError(f"eps must be in (0, 1), got {eps}")
    fact = svd(a)
    sigma2 = fact.sigma * fact.sigma
    tail2_k = float(np.sum(sigma2[k:]))
    lam = eps * tail2_k / (24.0 * k)
    p = tail_index_p(fact, k)
    if fact.rank == 0:
        spectral = 0.0
    else:
        spectral = spectral_approx_error(a, s, lam)
    if fact.rank <= p:
        frob_tp = 0.0
        frob_budget = math.inf
    else:
        split_p = head_tail_split(fact, a, p)
        frob_tp = frobenius_preservation_error(split_p.tail, s)
        tail2_p = float(np.sum(sigma2[p:]))
        frob_budget = (eps / 12.0) * tail2_k / tail2_p
    measured = {
        "spectral_eps": spectral,
        "frob_tail_p": frob_tp,
        "lambda_used": lam,
        "p_used": float(p),
    }
    thresholds = {
        "spectral_eps": eps / 24.0,
        "frob_tail_p": frob_budget,
    }
    return Certificate("T2", measured, thresholds, _holds(measured, thresholds))


def jl_moment_estimate(
    family: str, d: int, m: int, ell: int, trials: int, seed: int = 0
) -> JlMomentEstimate:
    """Monte-Carlo estimate of the ell-th moment E | |x^T S|_2^2 - 1 |^ell.

    Only the rotation-invariant gaussian family is supported, for which the
    fixed probe x = e_1 is fully general; each trial draws a fresh S on its
    own stream (trial t of seed s reproduces bit-for-bit inside any longer
    run with the same seed).
    """
    if family != "gaussian":
        raise UnsupportedFamilyError(f"unsupported family {family!r}")
    if d < 1 or m < 1:
        raise InvalidInputError(f"need d >= 1 and m >= 1, got d={d}, m={m}")
    if int(ell) != ell or ell < 2:
        raise InvalidInputError(f"moment order ell must be an integer >= 2, got {ell}")
    if trials < 100:
        raise InvalidInputError(f"need at least 100 trials, got {trials}")
    ell = int(ell)
    vals = np.empty(trials)
    for t in range(trials):
        # x = e_1 touches only the first row of S
        row = rng_for(seed, Stream.JL_TRIAL, t).standard_normal(m) / math.sqrt(m)
        vals[t] = abs(float(row @ row) - 1.0) ** ell
    estimate = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(trials))
    return JlMomentEstimate(ell, trials, estimate, stderr)
