"""Finite-alphabet channel types and information measures.

All information quantities are in bits (base-2 logarithms) with the
continuity convention 0 log 0 = 0.  Inputs that pass the simplex
tolerance are renormalized exactly before use so that drift cannot
compound through iterative solvers.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special

# Tolerance for simplex / row-stochasticity membership.
SIMPLEX_ATOL = 1e-9

LN2 = float(np.log(2.0))


class DegenerateRowError(ValueError):
    """A matrix row sums to zero, so row normalization is undefined."""

    def __init__(self, row: int):
        self.row = int(row)
        super().__init__(f"row {self.row} sums to zero; normalization undefined")


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def as_probability_vector(p) -> np.ndarray:
    """Validate and exactly renormalize a probability vector.

    Accepts a ProbabilityVector, sequence, or 1-D array.  Raises ValueError
    on a negative entry or a total mass farther than SIMPLEX_ATOL from 1.
    """
    if isinstance(p, ProbabilityVector):
        return p.values
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"probability vector must be 1-D, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("probability vector must be nonempty")
    if not np.all(np.isfinite(arr)):
        raise ValueError("probability vector has non-finite entries")
    if np.any(arr < 0):
        i = int(np.argmax(arr < 0))
        raise ValueError(f"probability vector has negative entry at index {i}: {arr[i]}")
    total = arr.sum()
    if abs(total - 1.0) > SIMPLEX_ATOL:
        raise ValueError(f"probability vector sums to {total}, not 1 within {SIMPLEX_ATOL}")
    return arr / total


def as_channel_matrix(W) -> np.ndarray:
    """Validate and exactly row-renormalize a channel matrix."""
    if isinstance(W, ChannelMatrix):
        return W.entries
    arr = np.asarray(W, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"channel matrix must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise ValueError(f"channel matrix has non-finite entry at row {bad[0]}, column {bad[1]}")
    neg = arr < 0
    if neg.any():
        bad = np.argwhere(neg)[0]
        raise ValueError(
            f"channel matrix has negative entry at row {bad[0]}, column {bad[1]}: {arr[tuple(bad)]}"
        )
    sums = arr.sum(axis=1)
    off = np.abs(sums - 1.0) > SIMPLEX_ATOL
    if off.any():
        i = int(np.argmax(off))
        raise ValueError(f"channel matrix row {i} sums to {sums[i]}, not 1 within {SIMPLEX_ATOL}")
    return arr / sums[:, None]


@dataclass(frozen=True)
class ProbabilityVector:
    """Point of the probability simplex; entries nonnegative, summing to 1."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(as_probability_vector(np.array(self.values, dtype=float))))

    def __len__(self):
        return self.values.size

    @staticmethod
    def uniform(n: int) -> "ProbabilityVector":
        return ProbabilityVector(np.full(int(n), 1.0 / int(n)))


@dataclass(frozen=True)
class ChannelMatrix:
    """Row-stochastic matrix of a discrete memoryless channel."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _freeze(as_channel_matrix(np.array(self.entries, dtype=float))))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def m(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class GainMatrix:
    """Nonnegative pre-normalization matrix with sampling provenance.

    `source` is the distribution the entries were drawn from (None for
    matrices loaded from disk or built by hand) and `seed` the 64-bit
    sampling seed.
    """

    entries: np.ndarray
    source: Optional[object] = None
    seed: Optional[int] = None

    def __post_init__(self):
        arr = np.array(self.entries, dtype=float)
        if arr.ndim != 2:
            raise ValueError(f"gain matrix must be 2-D, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            bad = np.argwhere(~np.isfinite(arr))[0]
            raise ValueError(f"gain matrix has non-finite entry at row {bad[0]}, column {bad[1]}")
        neg = arr < 0
        if neg.any():
            bad = np.argwhere(neg)[0]
            raise ValueError(f"gain matrix has negative entry at row {bad[0]}, column {bad[1]}")
        dead = ~(arr > 0).any(axis=1)
        if dead.any():
            raise DegenerateRowError(int(np.argmax(dead)))
        object.__setattr__(self, "entries", _freeze(arr))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def m(self) -> int:
        return self.entries.shape[1]


def entropy(p) -> float:
    """Shannon entropy of a probability vector, in bits."""
    arr = as_probability_vector(p)
    return float(special.entr(arr).sum() / LN2)


def relative_entropy(a, b) -> float:
    """Relative entropy D(a || b) in bits.

    Returns +inf (a distinguished value, not an error) when `a` puts mass
    where `b` has none; the dual capacity bound legitimately consults that
    case.
    """
    pa = as_probability_vector(a)
    pb = as_probability_vector(b)
    if pa.size != pb.size:
        raise ValueError(f"length mismatch: {pa.size} vs {pb.size}")
    return float(special.rel_entr(pa, pb).sum() / LN2)


def conditional_entropy_vector(W) -> np.ndarray:
    """Per-row entropies of a channel matrix (bits); entry x is H(W_x)."""
    arr = as_channel_matrix(W)
    return special.entr(arr).sum(axis=1) / LN2


def mutual_information(p, W) -> float:
    """Mutual information between input p and channel output, in bits.

    Computed as the p-average of the relative entropies between each
    channel row and the induced output distribution.
    """
    arr = as_channel_matrix(W)
    pv = as_probability_vector(p)
    if pv.size != arr.shape[0]:
        raise ValueError(f"input distribution length {pv.size} != number of rows {arr.shape[0]}")
    q = pv @ arr
    per_row = special.rel_entr(arr, q[None, :]).sum(axis=1)
    live = pv > 0
    return float(pv[live] @ per_row[live] / LN2)


def normalize_rows(V) -> ChannelMatrix:
    """Divide each row of a nonnegative matrix by its sum.

    Raises DegenerateRowError naming the first zero-sum row.
    """
    if isinstance(V, GainMatrix):
        arr = V.entries
    else:
        arr = np.asarray(V, dtype=float)
        if arr.ndim != 2:
            raise ValueError(f"matrix must be 2-D, got shape {arr.shape}")
        if np.any(arr < 0):
            bad = np.argwhere(arr < 0)[0]
            raise ValueError(f"negative entry at row {bad[0]}, column {bad[1]}")
    sums = arr.sum(axis=1)
    dead = ~(sums > 0)
    if dead.any():
        raise DegenerateRowError(int(np.argmax(dead)))
    return ChannelMatrix(arr / sums[:, None])


def _load_matrix(path) -> np.ndarray:
    arr = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise ValueError(f"{path}: non-finite value at row {bad[0]}, column {bad[1]}")
    neg = arr < 0
    if neg.any():
        bad = np.argwhere(neg)[0]
        raise ValueError(f"{path}: negative value at row {bad[0]}, column {bad[1]}")
    return arr


def load_channel_csv(path) -> ChannelMatrix:
    """Load a channel matrix from headerless CSV (n rows of m floats)."""
    arr = _load_matrix(path)
    sums = arr.sum(axis=1)
    off = np.abs(sums - 1.0) > SIMPLEX_ATOL
    if off.any():
        i = int(np.argmax(off))
        raise ValueError(f"{path}: row {i} sums to {sums[i]}, not 1 within {SIMPLEX_ATOL}")
    return ChannelMatrix(arr)


def load_gain_csv(path) -> GainMatrix:
    """Load a gain matrix from headerless CSV."""
    return GainMatrix(_load_matrix(path))


def save_matrix_csv(M, path) -> None:
    """Write a matrix (or wrapper type) as headerless CSV at full precision."""
    arr = M.entries if isinstance(M, (ChannelMatrix, GainMatrix)) else np.asarray(M, dtype=float)
    np.savetxt(path, arr, delimiter=",", fmt="%.17g")
