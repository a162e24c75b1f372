"""Empirical audits of cost preservation.

A sketch claims that |A_tilde - P A_tilde|_F^2 + c tracks |A - P A|_F^2
within a relative eps for every rank-<=k projection P.  This module builds
adversarial probe sets (singular subspaces of both matrices, residual
directions, random subspaces, coordinate axes, cluster indicators), scores
the signed relative error on each, ties certificates to the observed
errors (implication_test and the randomized harness around it), and checks
the transfer bound for approximate minimizers found on the sketch.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import inf

import numpy as np

from .errors import DimensionError, InvalidInputError, WidthNotReducingWarning
from .generators import GeneratorSpec, gen_synthetic
from .guarantees import Certificate, certify_matrix_approx, certify_spectral
from .linalg import Projection, as_matrix, frob2, haar_subspace, projection_cost, svd
from .rng import Stream, derive_seed, rng_for
from .sketch import Sketch, SketchParams, make_sketch
from .solvers import cluster_indicator_projection, lloyd_kmeans, partitions

__all__ = [
    "ProbeSet",
    "ProbeResult",
    "PcpReport",
    "ImplicationResult",
    "TransferCheck",
    "HarnessSummary",
    "generate_probes",
    "pcp_error_on_probe",
    "pcp_report",
    "implication_test",
    "implication_harness",
    "approx_transfer_check",
]

ZERO_COST_REL = 1e-12
ZERO_CHECK_REL = 1e-8
_PROBE_LLOYD_RUNS = 5
_PROBE_LLOYD_ITERS = 25


@dataclass(frozen=True)
class ProbeSet:
    """Rank-<=k probe projections with their provenance tags."""

    probes: list
    k: int
    provenance: list
    seed: int

    def __post_init__(self):
        if not self.probes:
            raise InvalidInputError("probe set must be nonempty")
        if len(self.probes) != len(self.provenance):
            raise InvalidInputError("one provenance tag per probe required")
        for p in self.probes:
            if p.rank > self.k:
                raise InvalidInputError("probe rank exceeds k")

    def __len__(self) -> int:
        return len(self.probes)


@dataclass(frozen=True)
class ProbeResult:
    probe: str
    cost_a: float
    cost_sketch: float
    signed_rel_err: float
    zero_cost: bool = False


@dataclass(frozen=True)
class PcpReport:
    """Signed relative errors over a probe set; passes iff the max is under target.

    Probes with cost_a below 1e-12 * |A|_F^2 are scored by the absolute
    check |cost_sketch + c| <= 1e-8 * |A|_F^2 instead of a ratio (their
    signed error is recorded as 0, or +inf on failure, so the pass rule
    stays a single max comparison).
    """

    per_probe: list
    max_abs_rel_err: float
    eps_target: float
    passed: bool


@dataclass(frozen=True)
class ImplicationResult:
    certificate_t1: Certificate
    certificate_t2: Certificate
    report: PcpReport
    consistent: bool


@dataclass(frozen=True)
class TransferCheck:
    bound_holds: bool
    lhs: float
    rhs: float
    gamma: float
    chosen: int
    optimum: float


def _top_subspace(fact, j: int, n: int, kind: str) -> Projection | None:
    width = min(j, fact.rank)
    if width == 0:
        return None
    return Projection(fact.u[:, :width], kind=kind)


def generate_probes(
    a, a_tilde, k: int, n_random: int, seed: int = 0, exhaustive: bool = False
) -> ProbeSet:
    """Deterministic probe set targeting where cost preservation can break.

    Structured families: top-j singular subspaces of A and of the sketch for
    j = 1..k, the top subspace of A's residual after removing the sketch's
    top-k directions, spans of standard basis vectors (first k, and the k
    heaviest rows), cluster indicators from seeded Lloyd runs on the rows of
    both matrices, and the rank-0 probe.  ``n_random`` Haar subspaces are
    appended, and ``exhaustive`` adds every cluster indicator over
    partitions into at most k blocks (n <= 12 only).
    """
    a = as_matrix(a)
    at = as_matrix(a_tilde, "a_tilde")
    if at.shape[0] != a.shape[0]:
        raise DimensionError("matrix and sketch must have the same number of rows")
    if k < 1:
        raise InvalidInputError(f"k must be >= 1, got {k}")
    if n_random < 0:
        raise InvalidInputError(f"n_random must be >= 0, got {n_random}")
    n = a.shape[0]
    kk = min(k, n)
    probes: list[Projection] = []
    tags: list[str] = []

    def add(p: Projection | None, tag: str):
        if p is not None:
            probes.append(p)
            tags.append(tag)

    add(Projection(np.zeros((n, 0)), kind="custom"), "zero-rank")

    fa = svd(a)
    fs = svd(at)
    for j in range(1, kk + 1):
        if j <= fa.rank:
            add(_top_subspace(fa, j, n, "top-singular-of-A"), f"top-a-{j}")
        if j <= fs.rank:
            add(_top_subspace(fs, j, n, "top-singular-of-sketch"), f"top-sketch-{j}")

    if fs.rank > 0:
        q = fs.u[:, : min(kk, fs.rank)]
        residual = a - q @ (q.T @ a)
        fr = svd(residual)
        if fr.rank > 0:
            add(Projection(fr.u[:, : min(kk, fr.rank)], kind="custom"), "residual-top")

    eye = np.eye(n)
    add(Projection(eye[:, :kk], kind="basis-axes"), "axes-first")
    heavy = np.argsort(-np.sum(a * a, axis=1), kind="stable")[:kk]
    add(Projection(eye[:, np.sort(heavy)], kind="basis-axes"), "axes-heavy")

    if n >= kk:
        for run in range(_PROBE_LLOYD_RUNS):
            cl = lloyd_kmeans(
                a, kk, iters=_PROBE_LLOYD_ITERS, seed=derive_seed(seed, Stream.PROBE_LLOYD_A, run)
            )
            add(cluster_indicator_projection(cl.assignment, kk, n), f"kmeans-a-{run}")
            cl = lloyd_kmeans(
                at,
                kk,
                iters=_PROBE_LLOYD_ITERS,
                seed=derive_seed(seed, Stream.PROBE_LLOYD_SKETCH, run),
            )
            add(cluster_indicator_projection(cl.assignment, kk, n), f"kmeans-sketch-{run}")

    if exhaustive:
        if n > 12:
            raise InvalidInputError("exhaustive cluster probes need n <= 12")
        for labels in partitions(n, kk):
            blocks = max(labels) + 1
            add(
                cluster_indicator_projection(np.array(labels), kk, n),
                "partition-" + "".join(str(x) for x in labels) + f"-{blocks}blocks",
            )

    for i in range(n_random):
        add(haar_subspace(n, kk, derive_seed(seed, Stream.PROBE_HAAR, i)), f"haar-{i}")

    return ProbeSet(probes, k, tags, seed)


def pcp_error_on_probe(a, a_tilde, c: float, p: Projection) -> float:
    """Signed relative cost error (cost_sketch + c - cost_a) / cost_a."""
    a = as_matrix(a)
    at = as_matrix(a_tilde, "a_tilde")
    if at.shape[0] != a.shape[0]:
        raise DimensionError("matrix and sketch must have the same number of rows")
    cost_a = projection_cost(a, p)
    if cost_a <= ZERO_COST_REL * frob2(a):
        raise InvalidInputError(
            "probe cost on A is (numerically) zero; use the absolute zero check"
        )
    return (projection_cost(at, p) + c - cost_a) / cost_a


def pcp_report(a, a_tilde, c: float, probes: ProbeSet, eps_target: float) -> PcpReport:
    """Score every probe; pass iff max |signed error| <= eps_target."""
    a = as_matrix(a)
    at = as_matrix(a_tilde, "a_tilde")
    if at.shape[0] != a.shape[0]:
        raise DimensionError("matrix and sketch must have the same number of rows")
    if eps_target <= 0.0:
        raise InvalidInputError(f"eps_target must be positive, got {eps_target}")
    total = frob2(a)
    zero_floor = ZERO_COST_REL * total
    zero_tol = ZERO_CHECK_REL * total
    results = []
    worst = 0.0
    for probe, tag in zip(probes.probes, probes.provenance):
        cost_a = projection_cost(a, probe)
        cost_s = projection_cost(at, probe)
        if cost_a <= zero_floor:
            err = 0.0 if abs(cost_s + c) <= zero_tol else inf
            results.append(ProbeResult(tag, cost_a, cost_s, err, zero_cost=True))
        else:
            err = (cost_s + c - cost_a) / cost_a
            results.append(ProbeResult(tag, cost_a, cost_s, err))
        worst = max(worst, abs(err))
    return PcpReport(results, worst, eps_target, worst <= eps_target)


def implication_test(
    a,
    s,
    k: int,
    eps: float,
    probes: ProbeSet | None = None,
    n_random: int = 8,
    seed: int = 0,
) -> ImplicationResult:
    """Check that certificates only ever endorse sketches that audit clean.

    Forms A_tilde = A S with c = 0, runs both certifiers and the probe
    report at eps; consistent means each certificate that holds is matched
    by a passing report.  A false implication here would be a bug, not
    noise: the certificates are sufficient conditions.
    """
    a = as_matrix(a)
    s = as_matrix(s, "operator")
    a_tilde = a @ s
    t1 = certify_matrix_approx(a, s, k, eps)
    t2 = certify_spectral(a, s, k, eps)
    if probes is None:
        probes = generate_probes(a, a_tilde, k, n_random, seed)
    report = pcp_report(a, a_tilde, 0.0, probes, eps)
    consistent = (not t1.holds or report.passed) and (not t2.holds or report.passed)
    return ImplicationResult(t1, t2, report, consistent)


@dataclass(frozen=True)
class HarnessSummary:
    trials: int
    t1_holds: int
    t2_holds: int
    violations: list
    max_err_over_trials: float


def _harness_instance(rng, k: int, trial: int, seed: int):
    n = int(rng.integers(4, 13))
    d = int(rng.integers(max(8, k + 2), 31))
    family = trial % 4
    gseed = derive_seed(seed, Stream.HARNESS, trial, 1)
    if family == 0:
        return rng.standard_normal((n, d))
    if family == 1:
        r = min(int(rng.integers(1, 4)), n, d)
        eta = [0.0, 0.1, 0.5][trial % 3]
        return gen_synthetic(
            GeneratorSpec("lowrank", n=n, d=d, rank=r, noise=eta, seed=gseed)
        )
    if family == 2:
        alpha = [0.5, 1.0, 2.0][trial % 3]
        return gen_synthetic(GeneratorSpec("powerlaw", n=n, d=d, alpha=alpha, seed=gseed))
    # exact rank <= k so the spectral route can certify exactly
    r = min(k, n, d)
    return gen_synthetic(GeneratorSpec("lowrank", n=n, d=d, rank=r, noise=0.0, seed=gseed))


def implication_harness(
    trials: int,
    seed: int = 0,
    eps_choices: tuple = (0.3, 0.5),
    k_choices: tuple = (1, 2, 3),
    methods: tuple = ("gaussian", "nonoblivious", "leverage", "ridge"),
    width_factors: tuple = (0.25, 1.0, 2.0, 130.0),
    n_random_probes: int = 6,
) -> HarnessSummary:
    """Randomized sweep of the certificate-to-audit implication.

    Instances are small random matrices of mixed character (i.i.d., planted
    low rank with and without noise, power-law spectra, exact rank <= k);
    the operator cycles through the zero-constant constructions across a
    width sweep from far-too-narrow to generously wide.  Returns the trial
    summary including every implication violation found (expected: none).
    """
    if trials < 1:
        raise InvalidInputError(f"trials must be >= 1, got {trials}")
    violations = []
    t1_holds = t2_holds = 0
    worst = 0.0
    for t in range(trials):
        rng = rng_for(seed, Stream.HARNESS, t)
        k = k_choices[t % len(k_choices)]
        eps = eps_choices[(t // len(k_choices)) % len(eps_choices)]
        method = methods[t % len(methods)]
        a = _harness_instance(rng, k, t, seed)
        d = a.shape[1]
        width = max(2, int(round(d * width_factors[t % len(width_factors)])))
        params = SketchParams(
            k=k,
            eps=eps,
            delta=0.1,
            seed=derive_seed(seed, Stream.HARNESS, t, 2),
            m_override=width,
        )
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", WidthNotReducingWarning)
            sk = make_sketch(a, method, params)
        s = sk.operator_matrix()
        probes = generate_probes(
            a, sk.a_tilde, k, n_random_probes, derive_seed(seed, Stream.HARNESS, t, 3)
        )
        t1 = certify_matrix_approx(a, s, k, eps)
        t2 = certify_spectral(a, s, k, eps)
        report = pcp_report(a, sk.a_tilde, sk.c_const, probes, eps)
        t1_holds += t1.holds
        t2_holds += t2.holds
        worst = max(worst, report.max_abs_rel_err)
        if (t1.holds or t2.holds) and not report.passed:
            violations.append(
                {
                    "trial": t,
                    "method": method,
                    "k": k,
                    "eps": eps,
                    "width": width,
                    "max_abs_rel_err": report.max_abs_rel_err,
                    "t1_holds": t1.holds,
                    "t2_holds": t2.holds,
                }
            )
    return HarnessSummary(trials, t1_holds, t2_holds, violations, worst)


def approx_transfer_check(
    a, a_tilde, c: float, k: int, eps: float, candidates: list, gamma: float = 1.0
) -> TransferCheck:
    """Check the cost bound transferred by a gamma-approximate sketch solver.

    Among candidates whose sketch cost is within gamma of the best sketch
    cost, the one costing the most on A is the adversarial choice P_tilde;
    the bound |A - P_tilde A|_F^2 <= (1+eps) gamma / (1-eps) * min cost on A
    + (1-gamma) c / (1-eps) must hold for it (hence for every eligible
    choice).
    """
    a = as_matrix(a)
    at = as_matrix(a_tilde, "a_tilde")
    if not candidates:
        raise InvalidInputError("need at least one candidate projection")
    if gamma < 1.0:
        raise InvalidInputError(f"gamma must be >= 1, got {gamma}")
    if not 0.0 < eps < 1.0:
        raise InvalidInputError(f"eps must be in (0, 1), got {eps}")
    for p in candidates:
        if p.rank > k:
            raise InvalidInputError("candidate rank exceeds k")
    sketch_costs = np.array([projection_cost(at, p) for p in candidates])
    a_costs = np.array([projection_cost(a, p) for p in candidates])
    eligible_cut = gamma * float(sketch_costs.min()) + 1e-12 * (frob2(at) + 1.0)
    eligible = np.nonzero(sketch_costs <= eligible_cut)[0]
    chosen = int(eligible[np.argmax(a_costs[eligible])])
    lhs = float(a_costs[chosen])
    optimum = float(a_costs.min())
    rhs = (1.0 + eps) * gamma / (1.0 - eps) * optimum + (1.0 - gamma) * c / (1.0 - eps)
    holds = lhs <= rhs + 1e-8 * max(1.0, frob2(a))
    return TransferCheck(holds, lhs, rhs, gamma, chosen, optimum)
