"""Exact distillation probabilities and explicit Kraus protocol synthesis.

A strictly incoherent Kraus operator has at most one nonzero entry per row
and per column, so it factors as  K = P_pi * K_delta * P  (permutation x
diagonal x incoherent projector).  A success branch for target |phi> is a
strictly incoherent K with K|psi> proportional to |phi>.

Protocol synthesis for a pure source runs in three steps:

1. the optimal probability P is the smallest tail-sum ratio of the sorted
   squared-modulus profiles (source over target);
2. an intermediate profile x is built with  x >= P * q  entrywise and the
   source profile p majorized by x, via a running-maximum recursion: the
   cumulative floor is max(previous + P*q_l, prefix_p_l).  The slack both
   conditions leave is exactly 1 - P, so x sums to 1;
3. p = D x for a doubly stochastic D (T-transform chain), and splitting D
   into permutations gives the deterministic pre-processing branches; one
   saturated success operator on the intermediate state finishes the job.

Composing each pre-processing branch with the success operator yields a
flat branch list whose total success probability equals P exactly.  (A
single saturated operator alone is not optimal in general: saturating it
can strand the failure branch on a profile of too-low coherence rank, so
the two-stage route is required.)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    IncoherentTargetError,
    NonSquareError,
    NotStrictlyIncoherentError,
    ProtocolSynthesisError,
    RankDeficitError,
)
from .measures import coherence_rank, min_profile_ratio
from .states import DensityMatrix, PureStateVector, SUPPORT_TOL
from .subspaces import (
    DisjointFamily,
    PureSubspace,
    maximal_pure_subspaces,
    select_disjoint_family,
)

ENTRY_TOL = 1e-12        # magnitude below which a matrix entry counts as zero
DECOMP_TOL = 1e-12       # reconstruction tolerance for K = P_pi K_delta P
PROB_TOL = 1e-9          # probability bookkeeping tolerance


# ===========================================================================
# strictly incoherent Kraus operators
# ===========================================================================

@dataclass(frozen=True)
class StrictlyIncoherentKraus:
    """Square matrix with at most one nonzero entry per row and per column.

    ``permutation[j]`` is the row fed by column ``j`` (extended to a full
    permutation), ``diagonal[j]`` the complex coefficient applied there, and
    ``projector[j]`` marks the columns actually used.
    """

    matrix: np.ndarray
    permutation: tuple[int, ...]
    diagonal: np.ndarray
    projector: np.ndarray

    @classmethod
    def from_matrix(cls, raw) -> "StrictlyIncoherentKraus":
        mat = np.array(raw, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise NonSquareError(f"Kraus matrix must be square, got {mat.shape}")
        d = mat.shape[0]
        used_rows: set[int] = set()
        perm = [-1] * d
        diag = np.zeros(d, dtype=complex)
        proj = np.zeros(d)
        for j in range(d):
            rows = np.nonzero(np.abs(mat[:, j]) > ENTRY_TOL)[0]
            if len(rows) > 1:
                raise NotStrictlyIncoherentError(
                    f"column {j} has {len(rows)} nonzero entries"
                )
            if len(rows) == 1:
                i = int(rows[0])
                if i in used_rows:
                    raise NotStrictlyIncoherentError(
                        f"row {i} has more than one nonzero entry"
                    )
                used_rows.add(i)
                perm[j] = i
                diag[j] = mat[i, j]
                proj[j] = 1.0
        free_rows = iter(sorted(set(range(d)) - used_rows))
        for j in range(d):
            if perm[j] < 0:
                perm[j] = next(free_rows)
        kraus = cls(mat, tuple(perm), diag, proj)
        gap = np.abs(kraus.reconstruct() - mat).max()
        if gap > DECOMP_TOL:
            raise NotStrictlyIncoherentError(
                f"decomposition mismatch {gap:.3e}"
            )
        for arr in (mat, diag, proj):
            arr.flags.writeable = False
        return kraus

    @classmethod
    def from_entries(cls, dim: int, entries) -> "StrictlyIncoherentKraus":
        """Build from (row, column, value) triples."""
        mat = np.zeros((dim, dim), dtype=complex)
        for i, j, v in entries:
            mat[i, j] = v
        return cls.from_matrix(mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def decomposition(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(P_pi, K_delta, P) with matrix = P_pi @ K_delta @ P."""
        d = self.dim
        p_pi = np.zeros((d, d))
        for j, i in enumerate(self.permutation):
            p_pi[i, j] = 1.0
        return p_pi, np.diag(self.diagonal), np.diag(self.projector)

    def reconstruct(self) -> np.ndarray:
        p_pi, k_delta, proj = self.decomposition()
        return p_pi @ k_delta @ proj

    def effect_diagonal(self) -> np.ndarray:
        """Real diagonal of K†K (K†K is diagonal for this operator class)."""
        return (np.abs(self.diagonal) ** 2) * self.projector

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        return self.matrix @ amplitudes


# ===========================================================================
# plan containers
# ===========================================================================

@dataclass(frozen=True)
class PlanBranch:
    """One success branch: id, Kraus operator, analytic probability."""

    branch_id: str
    kraus: StrictlyIncoherentKraus
    probability: float


@dataclass(frozen=True)
class SubspaceYield:
    """Contribution of one selected subspace to the total probability."""

    subspace: PureSubspace
    ratio: float          # pure-state conversion probability for this branch
    achieved: float       # weight * ratio


@dataclass(frozen=True)
class MixedPmaxResult:
    """Maximal distillation probability of a mixed state, with breakdown."""

    p_max: float
    family: DisjointFamily
    per_subspace: tuple[SubspaceYield, ...]
    all_subspaces: tuple[PureSubspace, ...]
    overlap_adjusted: bool    # True when overlapping cliques forced a choice


@dataclass(frozen=True)
class DistillationPlan:
    """Flat list of success branches; failure is the implicit complement."""

    dim: int
    p_max: float
    branches: tuple[PlanBranch, ...]
    family_index_sets: tuple[tuple[int, ...], ...]
    per_subspace: tuple[SubspaceYield, ...] | None = None

    def completeness_gap(self) -> float:
        """Largest eigenvalue of sum(K†K) minus 1 (<= 0 for a valid plan)."""
        total = np.zeros((self.dim, self.dim), dtype=complex)
        for b in self.branches:
            total += b.kraus.matrix.conj().T @ b.kraus.matrix
        return float(np.linalg.eigvalsh(total).max() - 1.0)


@dataclass(frozen=True)
class BranchCheck:
    """Outcome of re-deriving branch outputs; falsy when a branch failed."""

    ok: bool
    failed_branch_id: str | None
    worst_fidelity: float

    def __bool__(self) -> bool:
        return self.ok


# ===========================================================================
# pure-state transformation probability and operators
# ===========================================================================

def pmax_pure(psi: PureStateVector, phi: PureStateVector) -> float:
    """Optimal conversion probability between pure states.

    Equals the smallest tail-sum ratio of the sorted squared-modulus
    profiles; 1 when the dephased source is majorized by the dephased
    target, 0 when the source coherence rank is too small.
    """
    return min_profile_ratio(psi.probabilities(), phi.probabilities())


def conversion_kraus(
    psi: PureStateVector,
    phi: PureStateVector,
    subspace: PureSubspace | None = None,
) -> StrictlyIncoherentKraus:
    """Single success operator at the largest admissible scale.

    Aligns both states by descending amplitude, divides target by source
    amplitude entrywise and rescales so the largest coefficient has unit
    modulus.  Its success probability is the smallest aligned ratio
    min_t |psi_t / phi_t|^2, which multi-branch protocols can beat.
    """
    if subspace is not None and tuple(sorted(subspace.indices)) != psi.support():
        raise ProtocolSynthesisError("subspace does not match the state support")
    src = psi.sorted_support()
    tgt = phi.sorted_support()
    if len(src) < len(tgt):
        raise RankDeficitError(
            f"source coherence rank {len(src)} below target rank {len(tgt)}"
        )
    amps_s = psi.amplitudes
    amps_t = phi.amplitudes
    coeffs = np.array([amps_t[i] / amps_s[j] for i, j in zip(tgt, src)])
    scale = 1.0 / np.abs(coeffs).max()
    return StrictlyIncoherentKraus.from_entries(
        psi.dim,
        [(i, j, scale * c) for (i, j), c in zip(zip(tgt, src), coeffs)],
    )


def _intermediate_profile(p: np.ndarray, q: np.ndarray, prob: float) -> np.ndarray:
    """Sorted profile x with x >= prob*q entrywise and p majorized by x."""
    n = p.size
    prefix = np.cumsum(p)
    x = np.empty(n)
    run = 0.0
    for l in range(n):
        new = max(run + prob * q[l], prefix[l])
        x[l] = new - run
        run = new
    x = np.sort(x)[::-1]
    total = x.sum()
    if abs(total - 1.0) > 1e-9:
        raise ProtocolSynthesisError(f"intermediate profile sums to {total!r}")
    return x / total


def _doubly_stochastic_bridge(x: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Doubly stochastic D with D @ x = p, given p majorized by x.

    Chain of two-index averaging transforms; each step pins one more
    sorted coordinate of the working vector to p.
    """
    n = x.size
    d_total = np.eye(n)
    y = x.astype(float).copy()
    for _ in range(4 * n * n + 8):
        order = np.argsort(-y, kind="stable")
        gap = y[order] - p
        if np.abs(gap).max() <= 1e-12:
            sort_perm = np.zeros((n, n))
            sort_perm[np.arange(n), order] = 1.0
            return sort_perm @ d_total
        i = int(np.argmax(gap > 1e-12))
        if gap[i] <= 1e-12:
            raise ProtocolSynthesisError("bridge found deficit without surplus")
        j = -1
        for t in range(i + 1, n):
            if gap[t] < -1e-12:
                j = t
                break
        if j < 0:
            raise ProtocolSynthesisError("bridge lost mass")
        delta = min(gap[i], -gap[j])
        u, v = int(order[i]), int(order[j])
        lam = 1.0 - delta / (y[u] - y[v])
        t_mat = np.eye(n)
        t_mat[u, u] = t_mat[v, v] = lam
        t_mat[u, v] = t_mat[v, u] = 1.0 - lam
        y = t_mat @ y
        d_total = t_mat @ d_total
    raise ProtocolSynthesisError("majorization bridge did not converge")


def _positive_matching(mask: np.ndarray) -> list[int] | None:
    """Perfect matching (row -> column) on a boolean matrix, or None."""
    n = mask.shape[0]
    col_owner = [-1] * n

    def try_row(r: int, seen: list[bool]) -> bool:
        for c in range(n):
            if mask[r, c] and not seen[c]:
                seen[c] = True
                if col_owner[c] < 0 or try_row(col_owner[c], seen):
                    col_owner[c] = r
                    return True
        return False

    for r in range(n):
        if not try_row(r, [False] * n):
            return None
    out = [-1] * n
    for c, r in enumerate(col_owner):
        out[r] = c
    return out


def _permutation_mixture(d_mat: np.ndarray) -> list[tuple[float, tuple[int, ...]]]:
    """Split a doubly stochastic matrix into weighted permutations."""
    n = d_mat.shape[0]
    rem = d_mat.astype(float).copy()
    parts: list[tuple[float, tuple[int, ...]]] = []
    for _ in range(n * n + n):
        if rem.sum() <= 1e-10 * n:
            break
        perm = _positive_matching(rem > 1e-11)
        if perm is None:
            if rem.sum() <= 1e-7 * n:
                break
            raise ProtocolSynthesisError("no positive matching in mixing matrix")
        w = float(min(rem[t, perm[t]] for t in range(n)))
        parts.append((w, tuple(perm)))
        for t in range(n):
            rem[t, perm[t]] -= w
    total = sum(w for w, _ in parts)
    if abs(total - 1.0) > 1e-6:
        raise ProtocolSynthesisError(f"permutation weights sum to {total!r}")
    return [(w / total, s) for w, s in parts]


def optimal_protocol(
    psi: PureStateVector, phi: PureStateVector
) -> list[tuple[StrictlyIncoherentKraus, float]]:
    """Branch list achieving the exact optimum for a pure source.

    Returns (operator, branch probability) pairs; probabilities add up to
    ``pmax_pure(psi, phi)`` within numerical tolerance.  Every operator
    maps |psi> onto a multiple of |phi>.
    """
    src = psi.sorted_support()
    tgt = phi.sorted_support()
    n, m = len(src), len(tgt)
    if n < m:
        raise RankDeficitError(
            f"source coherence rank {n} below target rank {m}"
        )
    p = psi.probabilities()[list(src)]
    q = np.zeros(n)
    q[:m] = phi.probabilities()[list(tgt)]
    prob = min_profile_ratio(p, q)
    if prob <= 0.0:
        raise RankDeficitError("conversion probability is zero")

    x = _intermediate_profile(p, q, prob)
    if np.min(x[:m] - prob * q[:m]) < -1e-9:
        raise ProtocolSynthesisError("intermediate profile violates its floor")

    # success operator on the intermediate state: slot u -> target index
    scale = float(np.sqrt(np.min(x[:m] / q[:m])))
    amps_t = phi.amplitudes

    # deterministic pre-processing: p = sum_a w_a * x[sigma_a(t)]
    if np.abs(x - p).max() <= 1e-13:
        mixture = [(1.0, tuple(range(n)))]
    else:
        mixture = _permutation_mixture(_doubly_stochastic_bridge(x, p))

    branches: list[tuple[StrictlyIncoherentKraus, float]] = []
    amps_s = psi.amplitudes
    sqrt_x = np.sqrt(x)
    for w, sigma in mixture:
        entries = []
        for t in range(n):
            slot = sigma[t]
            if slot >= m or x[slot] <= 0.0:
                continue
            coeff = (
                np.sqrt(w)
                * (sqrt_x[slot] / amps_s[src[t]])
                * (scale * amps_t[tgt[slot]] / sqrt_x[slot])
            )
            entries.append((tgt[slot], src[t], coeff))
        if not entries:
            continue
        kraus = StrictlyIncoherentKraus.from_entries(psi.dim, entries)
        branches.append((kraus, w * scale * scale))

    total = sum(b for _, b in branches)
    if abs(total - prob) > PROB_TOL:
        raise ProtocolSynthesisError(
            f"synthesized total probability {total!r} != formula value {prob!r}"
        )
    return branches


# ===========================================================================
# mixed states
# ===========================================================================

def pmax_mixed(rho: DensityMatrix, phi: PureStateVector) -> MixedPmaxResult:
    """Maximal distillation probability from a mixed state.

    Decomposes rho into its maximal pure subspaces, selects the best
    pairwise-disjoint family, and adds up weight-scaled pure conversion
    probabilities.  ``overlap_adjusted`` flags inputs where overlapping
    subspaces made the selection strict.
    """
    if coherence_rank(phi) < 2:
        raise IncoherentTargetError(
            "target has coherence rank 1; it is reachable for free"
        )
    subs = maximal_pure_subspaces(rho)
    family = select_disjoint_family(subs, phi)
    target_w = phi.probabilities()
    per = tuple(
        SubspaceYield(
            s,
            (r := min_profile_ratio(s.state.probabilities(), target_w)),
            s.weight * r,
        )
        for s in family.members
    )
    p_max = float(sum(y.achieved for y in per))
    naive = sum(
        s.weight * min_profile_ratio(s.state.probabilities(), target_w)
        for s in subs
    )
    return MixedPmaxResult(
        p_max=p_max,
        family=family,
        per_subspace=per,
        all_subspaces=tuple(subs),
        overlap_adjusted=bool(naive > p_max + 1e-12),
    )


def full_plan(rho: DensityMatrix, phi: PureStateVector) -> DistillationPlan:
    """Synthesize the complete branch list attaining pmax_mixed.

    Subspaces whose conversion ratio is zero contribute no branches.  The
    input columns of every branch live inside its own subspace, so the
    combined operator family stays complete.
    """
    mixed = pmax_mixed(rho, phi)
    branches: list[PlanBranch] = []
    for mu, y in enumerate(mixed.per_subspace):
        if y.ratio <= 0.0:
            continue
        proto = optimal_protocol(y.subspace.state, phi)
        for a, (kraus, branch_prob) in enumerate(proto):
            branches.append(
                PlanBranch(f"s{mu}.k{a}", kraus, y.subspace.weight * branch_prob)
            )
    plan = DistillationPlan(
        dim=rho.dim,
        p_max=mixed.p_max,
        branches=tuple(branches),
        family_index_sets=mixed.family.index_sets(),
        per_subspace=mixed.per_subspace,
    )
    total = sum(b.probability for b in branches)
    if abs(total - mixed.p_max) > PROB_TOL:
        raise ProtocolSynthesisError(
            f"plan total {total!r} != formula value {mixed.p_max!r}"
        )
    if plan.completeness_gap() > PROB_TOL:
        raise ProtocolSynthesisError("plan overshoots completeness")
    return plan


def verify_branch_outputs(
    plan: DistillationPlan, rho: DensityMatrix, phi: PureStateVector
) -> BranchCheck:
    """Recompute K rho K† for every branch and compare with the target.

    Passes when each branch output, normalized, has fidelity with |phi>
    of at least 1 - 1e-9.  Branches with vanishing probability on this
    input are skipped.
    """
    worst = 1.0
    for b in plan.branches:
        out = b.kraus.matrix @ rho.matrix @ b.kraus.matrix.conj().T
        weight = float(np.real(np.trace(out)))
        if weight <= 1e-15:
            continue
        fid = float(np.real(phi.amplitudes.conj() @ out @ phi.amplitudes) / weight)
        if fid < worst:
            worst = fid
        if fid < 1.0 - 1e-9:
            return BranchCheck(False, b.branch_id, worst)
    return BranchCheck(True, None, worst)
