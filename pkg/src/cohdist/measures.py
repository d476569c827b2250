"""Distribution-level coherence measures and order relations.

All functions here work on plain nonnegative weight vectors (squared
moduli); sorting is descending with stable tie order by original index.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ValidationError
from .states import PureStateVector, SUPPORT_TOL, as_distribution

MAJORIZATION_TOL = 1e-10


def sorted_descending(weights) -> np.ndarray:
    w = np.array(weights, dtype=float)
    return w[np.argsort(-w, kind="stable")]


def coherence_rank(psi: PureStateVector) -> int:
    """Number of amplitudes with squared modulus above SUPPORT_TOL."""
    return len(psi.support())


def suffix_profile(weights) -> np.ndarray:
    """Tail sums of the descending-sorted weights.

    Entry ``l`` (0-based) is the total weight outside the ``l`` largest
    entries' complement, i.e. sum of entries ``l..d-1`` after sorting.
    Entry 0 equals the full total.
    """
    w = sorted_descending(weights)
    out = np.cumsum(w[::-1])[::-1]
    out[out < 0.0] = 0.0
    return out


def cl_profile(psi: PureStateVector) -> np.ndarray:
    """Tail-sum coherence profile of a pure state; entry 0 is 1."""
    return suffix_profile(psi.probabilities())


def min_profile_ratio(source_weights, target_weights) -> float:
    """Smallest tail-sum ratio C_l(source)/C_l(target) over all depths.

    Profiles are zero-padded to a common length.  Depths where the target
    tail vanishes are skipped (ratio +inf); a vanishing source tail against
    a positive target tail pins the result to 0.  Result lies in [0, 1]
    whenever both inputs are unit-sum.
    """
    p = np.asarray(source_weights, dtype=float)
    q = np.asarray(target_weights, dtype=float)
    d = max(p.size, q.size)
    cp = suffix_profile(np.pad(p, (0, d - p.size)))
    cq = suffix_profile(np.pad(q, (0, d - q.size)))
    best = 1.0
    for a, b in zip(cp, cq):
        if b <= SUPPORT_TOL:
            continue
        if a <= SUPPORT_TOL:
            return 0.0
        best = min(best, a / b)
    return float(min(1.0, max(0.0, best)))


def majorizes(p, q, *, tol: float = MAJORIZATION_TOL) -> bool:
    """True iff ``p`` is majorized by ``q`` (written p < q).

    Checks that every descending-order partial sum of ``p`` is at most the
    matching partial sum of ``q``, within ``tol``; vectors are zero-padded
    to a common length and must be valid distributions.
    """
    pw = as_distribution(p)
    qw = as_distribution(q)
    d = max(pw.size, qw.size)
    ps = np.cumsum(sorted_descending(np.pad(pw, (0, d - pw.size))))
    qs = np.cumsum(sorted_descending(np.pad(qw, (0, d - qw.size))))
    return bool(np.all(ps <= qs + tol))


def tensor(p, q) -> np.ndarray:
    """Product distribution: all pairwise products, row-major order."""
    pw = as_distribution(p)
    qw = as_distribution(q)
    return np.outer(pw, qw).ravel()


def power_mean(weights, alpha: float) -> float:
    """Power mean A_alpha(w) = (mean(w_i^alpha))^(1/alpha).

    Analytic continuations: alpha=0 is the geometric mean, alpha=+inf the
    maximum entry, alpha=-inf the minimum entry.  Any zero entry makes
    A_alpha = 0 for every alpha <= 0.  The averaging dimension is the full
    length of ``weights`` including zero padding.
    """
    w = np.array(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ValidationError(f"expected a nonempty 1-d vector, got shape {w.shape}")
    if w.min() < 0.0:
        raise ValidationError(f"negative weight {w.min()!r}")
    if math.isinf(alpha):
        return float(w.max()) if alpha > 0 else float(w.min())
    # below ~1e-8 the generic formula degenerates to 1.0 in floats; the
    # geometric-mean limit is the accurate continuation there
    if abs(alpha) <= 1e-8:
        if w.min() <= 0.0:
            return 0.0
        return float(np.exp(np.mean(np.log(w))))
    if alpha < 0.0 and w.min() <= 0.0:
        return 0.0
    with np.errstate(over="ignore", divide="ignore"):
        m = float(np.mean(w ** alpha))
        if math.isinf(m):
            return 0.0 if alpha < 0 else math.inf
        return float(m ** (1.0 / alpha))


def shannon_entropy(weights) -> float:
    """Shannon entropy in nats with the 0*log(0) = 0 convention."""
    w = np.array(weights, dtype=float)
    if w.ndim != 1 or w.min() < 0.0:
        raise ValidationError("expected a nonnegative 1-d vector")
    pos = w[w > 0.0]
    return float(-(pos * np.log(pos)).sum())
