"""State containers and validation for the fixed incoherent basis.

Everything downstream works in one fixed orthonormal basis {|0>, ..., |d-1>}
(all indices 0-based).  Diagonal density matrices are the free states; the
dephasing map keeps the diagonal and drops every off-diagonal entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateStateError,
    NonSquareError,
    NotHermitianError,
    NotPSDError,
    TraceNotOneError,
    ValidationError,
)

# ===========================================================================
# tolerances (shared across modules)
# ===========================================================================

HERMITIAN_TOL = 1e-10     # max |rho - rho†| entry
PSD_FLOOR = -1e-10        # smallest admissible eigenvalue
TRACE_TOL = 1e-10         # |tr(rho) - 1|, |norm(psi) - 1|, |sum(w) - 1|
SUPPORT_TOL = 1e-12       # squared-modulus threshold for "nonzero amplitude"


def _as_complex_matrix(raw) -> np.ndarray:
    arr = np.array(raw, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise NonSquareError(f"expected a square matrix, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class DensityMatrix:
    """Validated density matrix in the incoherent basis.

    Construction checks Hermiticity, positive semidefiniteness and unit
    trace at the module tolerances; the stored array is read-only.
    """

    matrix: np.ndarray

    def __post_init__(self):
        arr = _as_complex_matrix(self.matrix)
        herm_gap = np.abs(arr - arr.conj().T).max()
        if herm_gap > HERMITIAN_TOL:
            raise NotHermitianError(
                f"matrix is not Hermitian: max |rho - rho†| = {herm_gap:.3e}"
            )
        arr = 0.5 * (arr + arr.conj().T)   # symmetrize validated input
        eig_min = float(np.linalg.eigvalsh(arr).min())
        if eig_min < PSD_FLOOR:
            raise NotPSDError(
                f"matrix is not PSD: min eigenvalue = {eig_min:.3e}", eig_min
            )
        tr = float(arr.trace().real)
        if abs(tr - 1.0) > TRACE_TOL:
            raise TraceNotOneError(f"trace is {tr!r}, expected 1")
        arr.flags.writeable = False
        object.__setattr__(self, "matrix", arr)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def diagonal(self) -> np.ndarray:
        """Populations rho_ii as a real vector."""
        return np.real(np.diag(self.matrix)).copy()

    @classmethod
    def from_pure(cls, psi: "PureStateVector") -> "DensityMatrix":
        return cls(np.outer(psi.amplitudes, psi.amplitudes.conj()))


@dataclass(frozen=True)
class PureStateVector:
    """Unit-norm complex amplitude vector in the incoherent basis."""

    amplitudes: np.ndarray

    def __post_init__(self):
        arr = np.array(self.amplitudes, dtype=complex)
        if arr.ndim != 1 or arr.size == 0:
            raise ValidationError(f"expected a nonempty 1-d vector, got shape {arr.shape}")
        norm = float(np.linalg.norm(arr))
        if abs(norm - 1.0) > TRACE_TOL:
            raise TraceNotOneError(f"vector norm is {norm!r}, expected 1")
        arr.flags.writeable = False
        object.__setattr__(self, "amplitudes", arr)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def support(self) -> tuple[int, ...]:
        """Indices carrying more than SUPPORT_TOL of squared modulus."""
        return tuple(int(i) for i in np.nonzero(self.probabilities() > SUPPORT_TOL)[0])

    def sorted_support(self) -> tuple[int, ...]:
        """Support indices ordered by descending weight, ties by index."""
        probs = self.probabilities()
        order = np.argsort(-probs, kind="stable")
        return tuple(int(i) for i in order if probs[i] > SUPPORT_TOL)

    @classmethod
    def from_probabilities(cls, weights) -> "PureStateVector":
        """Real nonnegative-amplitude state with the given squared moduli."""
        w = as_distribution(weights)
        return cls(np.sqrt(w).astype(complex))


def validate_density(raw) -> DensityMatrix:
    """Validate raw matrix data and wrap it as a :class:`DensityMatrix`.

    Parameters
    ----------
    raw : array-like
        Square complex matrix.

    Raises
    ------
    NonSquareError, NotHermitianError, NotPSDError, TraceNotOneError
    """
    return DensityMatrix(raw)


def as_distribution(weights, *, tol: float = TRACE_TOL) -> np.ndarray:
    """Validate a probability vector: nonnegative entries summing to one."""
    w = np.array(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ValidationError(f"expected a nonempty 1-d weight vector, got shape {w.shape}")
    if w.min() < -tol:
        raise ValidationError(f"negative weight {w.min()!r}")
    w = np.clip(w, 0.0, None)
    total = float(w.sum())
    if abs(total - 1.0) > tol:
        raise TraceNotOneError(f"weights sum to {total!r}, expected 1")
    return w


def dephase(rho: DensityMatrix) -> DensityMatrix:
    """Apply the diagonal-keeping (fully dephasing) map."""
    return DensityMatrix(np.diag(np.diag(rho.matrix)))


def entrywise_abs(rho: DensityMatrix) -> np.ndarray:
    """Entrywise modulus |rho_ij| as a real matrix."""
    return np.abs(rho.matrix)


def positive_diagonal_indices(rho: DensityMatrix) -> tuple[int, ...]:
    """Indices with rho_ii > SUPPORT_TOL; raises if there are none."""
    idx = tuple(int(i) for i in np.nonzero(rho.diagonal() > SUPPORT_TOL)[0])
    if not idx:
        raise DegenerateStateError("state has no strictly positive population")
    return idx
