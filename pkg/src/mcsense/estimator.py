"""Nonlinear least-squares detection of the active channel set.

The snapshot vectors follow the linear model y = A(b) x + n with the
p x N modulation matrix A(b)(i,k) = exp(2j*pi*c_i*b_k/L) and white noise
of power sigma2 per branch. Candidate supports are scored by projecting
the sample correlation matrix onto the orthogonal complement of A's
column space:

    J(b) = trace{(I - A A^+) R_hat},   J(empty) = trace(R_hat)

At the true support the expectation of J is sigma2*(p - N), which makes
sigma2*(p - i) the natural noise floor after i admissions. The greedy
search admits one channel at a time (the one minimizing J) and stops as
soon as the criterion no longer exceeds the floor of the previous step,
i.e. after the k-th admission it continues only while
J(b_k) > sigma2*(p - k + 1). An exhaustive search over supports of
growing cardinality serves as the reference oracle.

The bandwidth scalar that the data model attaches to A is omitted: the
projector, and therefore J, depends only on the column space of A.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .multicoset import CosetPattern, SnapshotMatrix
from .spectrum import ActiveChannelSet, active_set

RANK_TOL = 1e-8
TIE_REL_TOL = 1e-12
# Analytic correlation matrices put J exactly on the decision boundary;
# comparisons treat values this close to the floor as having reached it.
BOUNDARY_REL_TOL = 1e-9


def _boundary_eps(R_hat: "SampleCorrelation", sigma2: float) -> float:
    return BOUNDARY_REL_TOL * max(R_hat.trace, R_hat.p * sigma2)


class RankDeficientError(ValueError):
    """Candidate support whose modulation matrix lost full column rank."""


@dataclass(frozen=True)
class SampleCorrelation:
    """Hermitian p x p sample correlation with its snapshot count."""

    matrix: np.ndarray
    M: int

    def __post_init__(self):
        self.matrix.setflags(write=False)

    @property
    def p(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))


def sample_correlation(snap: SnapshotMatrix) -> SampleCorrelation:
    """R_hat = (1/M) * sum_m x_d(m) x_d(m)^*, symmetrized to Hermitian."""
    X = snap.entries
    M = snap.M
    R = X @ X.conj().T / M
    R = 0.5 * (R + R.conj().T)
    return SampleCorrelation(matrix=R, M=M)


@dataclass(frozen=True)
class ModulationMatrix:
    """Unit-modulus p x N steering matrix for a (pattern, support) pair."""

    matrix: np.ndarray
    pattern: CosetPattern
    b: ActiveChannelSet

    def __post_init__(self):
        self.matrix.setflags(write=False)


def steering_columns(pattern: CosetPattern, channels) -> np.ndarray:
    """Columns exp(2j*pi*c_i*b_k/L) for the given channel indices."""
    c = np.asarray(pattern.c, dtype=np.float64)
    b = np.asarray(list(channels), dtype=np.float64)
    return np.exp(2j * np.pi * np.outer(c, b) / pattern.L)


def modulation_matrix(b: ActiveChannelSet, pattern: CosetPattern) -> ModulationMatrix:
    """Build A(b); columns follow b's canonical (ascending) order."""
    if b.N == 0:
        raise ValueError("empty support has no modulation matrix; J(empty) = trace(R)")
    if b.N > pattern.p:
        raise ValueError(f"support size {b.N} exceeds branch count p={pattern.p}")
    if b.indices[-1] >= pattern.L:
        raise ValueError(f"channel {b.indices[-1]} out of range for L={pattern.L}")
    return ModulationMatrix(matrix=steering_columns(pattern, b.indices),
                            pattern=pattern, b=b)


def _orthonormal_columns(A: np.ndarray) -> np.ndarray:
    """Orthonormal basis of col(A) by modified Gram-Schmidt with one
    reorthogonalization pass.

    Raises RankDeficientError when a column's residual norm falls below
    RANK_TOL * sqrt(p).
    """
    p, n = A.shape
    threshold = RANK_TOL * math.sqrt(p)
    Q = np.zeros((p, n), dtype=np.complex128)
    for j in range(n):
        v = A[:, j].astype(np.complex128)
        for _ in range(2):
            if j:
                v = v - Q[:, :j] @ (Q[:, :j].conj().T @ v)
        nrm = np.linalg.norm(v)
        if nrm < threshold:
            raise RankDeficientError(
                f"column {j} is within {threshold:.1e} of the span of its predecessors"
            )
        Q[:, j] = v / nrm
    return Q


def criterion_for_matrix(R_hat: SampleCorrelation, A: np.ndarray) -> float:
    """J = trace{(I - A A^+) R_hat} for an explicit steering matrix."""
    Q = _orthonormal_columns(A)
    fitted = np.real(np.einsum("ij,ij->", Q.conj(), R_hat.matrix @ Q))
    return R_hat.trace - float(fitted)


def lse_criterion(R_hat: SampleCorrelation, b: ActiveChannelSet,
                  pattern: CosetPattern) -> float:
    """Least-squares criterion J(b); J(empty) = trace(R_hat).

    Raises RankDeficientError for degenerate supports, which greedy and
    exhaustive searches treat as candidates to skip.
    """
    if b.N == 0:
        return R_hat.trace
    return criterion_for_matrix(R_hat, modulation_matrix(b, pattern).matrix)


def noise_power_estimate(R_hat: SampleCorrelation, N_max: int) -> float:
    """Estimate sigma2 as the mean of the p - N_max smallest eigenvalues.

    Convenience extension for when the noise power is not known a priori;
    the detection operations themselves take sigma2 as an input.
    """
    if not 0 < N_max < R_hat.p:
        raise ValueError(f"need 0 < N_max < p, got N_max={N_max}, p={R_hat.p}")
    eigvals = np.linalg.eigvalsh(R_hat.matrix)
    return float(np.mean(eigvals[: R_hat.p - N_max]))


@dataclass(frozen=True)
class SelectionStep:
    """One admission: the channel, J after admitting it, and the noise
    floor sigma2*(p - i) for the step index i = number admitted so far."""

    channel: int
    criterion: float
    threshold: float


@dataclass(frozen=True)
class DetectionResult:
    """Estimated support with the full search trace."""

    b_hat: ActiveChannelSet
    N_hat: int
    steps: tuple[SelectionStep, ...]
    terminated_by: str  # "threshold-met" | "Nmax-reached" | "p-exhausted"

    @property
    def final_criterion(self) -> float:
        return self.steps[-1].criterion if self.steps else math.nan


def sequential_forward_nlls(R_hat: SampleCorrelation, pattern: CosetPattern,
                            sigma2: float, N_max: int) -> DetectionResult:
    """Greedy forward selection of the active channel set.

    Starting from the empty set, each step admits the channel minimizing
    J; ties within TIE_REL_TOL go to the smaller channel index. The
    search stops once J falls to the previous step's noise floor
    (J(b_k) <= sigma2*(p - k + 1), with J(empty) <= p*sigma2 stopping
    before any admission), when N_max channels have been admitted, or
    when no admissible candidate remains. Cost is at most L*N_max
    criterion evaluations.
    """
    if sigma2 <= 0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    p = pattern.p
    L = pattern.L
    if not 0 < N_max < p:
        raise ValueError(f"need 0 < N_max < p, got N_max={N_max}, p={p}")

    eps = _boundary_eps(R_hat, sigma2)
    J = R_hat.trace
    if J <= p * sigma2 + eps:
        return DetectionResult(b_hat=active_set(()), N_hat=0, steps=(),
                               terminated_by="threshold-met")

    basis = np.zeros((p, 0), dtype=np.complex128)
    chosen: list[int] = []
    steps: list[SelectionStep] = []
    candidates = list(range(L))
    terminated_by = "p-exhausted"

    while True:
        A = steering_columns(pattern, candidates)
        V = A - basis @ (basis.conj().T @ A)
        V = V - basis @ (basis.conj().T @ V)
        norms = np.linalg.norm(V, axis=0)
        admissible = norms >= RANK_TOL * math.sqrt(p)
        if not admissible.any():
            break
        keep = np.flatnonzero(admissible)
        Q_cand = V[:, keep] / norms[keep]
        fitted = np.real(np.einsum("ij,ij->j", Q_cand.conj(), R_hat.matrix @ Q_cand))
        channels = [candidates[j] for j in keep]

        best = 0
        for j in range(1, len(channels)):
            if fitted[j] > fitted[best] + TIE_REL_TOL * abs(fitted[best]):
                best = j
        b_new = channels[best]

        stop_floor = (p - len(chosen)) * sigma2
        J = J - float(fitted[best])
        chosen.append(b_new)
        candidates.remove(b_new)
        basis = np.hstack([basis, Q_cand[:, best][:, None]])

        steps.append(SelectionStep(channel=b_new, criterion=J,
                                   threshold=(p - len(chosen)) * sigma2))
        if not J > stop_floor + eps:
            terminated_by = "threshold-met"
            break
        if len(chosen) >= N_max:
            terminated_by = "Nmax-reached"
            break
        if len(chosen) >= p - 1:
            terminated_by = "p-exhausted"
            break

    return DetectionResult(b_hat=active_set(chosen), N_hat=len(chosen),
                           steps=tuple(steps), terminated_by=terminated_by)


def exhaustive_nlls(R_hat: SampleCorrelation, pattern: CosetPattern,
                    sigma2: float, N_max: int,
                    max_candidates: int = 10**6) -> DetectionResult:
    """Minimum-cardinality support satisfying J(b) <= sigma2*(p - |b|).

    Enumerates supports of growing size; among satisfying supports of the
    winning cardinality, ties break by smallest J and then lexicographic
    order. If nothing satisfies the condition within N_max, the best
    N_max-sized support is returned with terminated_by="Nmax-reached".
    """
    if sigma2 <= 0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    p = pattern.p
    L = pattern.L
    if not 0 < N_max <= p:
        raise ValueError(f"need 0 < N_max <= p, got N_max={N_max}, p={p}")
    space = sum(math.comb(L, i) for i in range(1, N_max + 1))
    if space > max_candidates:
        raise ValueError(
            f"search space of {space} supports exceeds the {max_candidates} guard"
        )

    eps = _boundary_eps(R_hat, sigma2)
    if R_hat.trace <= p * sigma2 + eps:
        return DetectionResult(b_hat=active_set(()), N_hat=0, steps=(),
                               terminated_by="threshold-met")

    last_best = None
    for size in range(1, N_max + 1):
        best = None
        for combo in combinations(range(L), size):
            try:
                J = criterion_for_matrix(R_hat, steering_columns(pattern, combo))
            except RankDeficientError:
                continue
            if best is None or J < best[0] - TIE_REL_TOL * abs(best[0]):
                best = (J, combo)
        if best is None:
            continue
        last_best = best
        if best[0] <= (p - size) * sigma2 + eps:
            steps = tuple(
                SelectionStep(channel=ch, criterion=best[0],
                              threshold=(p - size) * sigma2)
                for ch in best[1]
            )
            return DetectionResult(b_hat=active_set(best[1]), N_hat=size,
                                   steps=steps, terminated_by="threshold-met")

    J, combo = last_best
    steps = tuple(
        SelectionStep(channel=ch, criterion=J, threshold=(p - len(combo)) * sigma2)
        for ch in combo
    )
    return DetectionResult(b_hat=active_set(combo), N_hat=len(combo),
                           steps=steps, terminated_by="Nmax-reached")


def report_record(result: DetectionResult, pattern: CosetPattern,
                  sigma2: float) -> dict:
    """JSON-serializable detection report record."""
    return {
        "pattern": {"L": pattern.L, "p": pattern.p, "c": list(pattern.c)},
        "sigma2": sigma2,
        "steps": [
            {"channel": s.channel, "criterion": s.criterion, "threshold": s.threshold}
            for s in result.steps
        ],
        "b_hat": list(result.b_hat.indices),
        "N_hat": result.N_hat,
        "terminated_by": result.terminated_by,
    }
