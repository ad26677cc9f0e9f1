"""Certified capacity brackets for discrete memoryless channels.

The capacity program max_p I(p, W) has a Lagrangian dual over lambda in
R^m whose value G(lambda) + F(lambda) upper-bounds capacity for every
lambda (weak duality).  Both pieces have closed forms:

    G(lambda) = max_x (W lambda - r)_x        F(lambda) = log2 sum_y 2^(-lambda_y)

with r the vector of row entropies.  The solver runs alternating
minimization on the input distribution and certifies each iterate by
evaluating the dual at lambda = -log2 q for the induced output
distribution q, which yields the bracket  I(p, W) <= C(W) <= max_x D(W_x || q).
"""

from dataclasses import dataclass

import numpy as np
from scipy import special

from .channel import (
    LN2,
    ProbabilityVector,
    as_channel_matrix,
    as_probability_vector,
    conditional_entropy_vector,
)

# Iterates are clamped here before renormalization so underflow cannot
# create absorbing zero-probability inputs.
_P_FLOOR = 1e-300


@dataclass(frozen=True)
class DualCertificate:
    """A dual point lambda (length m, +inf entries allowed) and its value.

    The value is G(lambda) + F(lambda) in bits and can be recomputed from
    lambda and the channel alone; it upper-bounds the capacity.
    """

    lam: np.ndarray
    value: float


@dataclass(frozen=True)
class CapacityBracket:
    """Certified sandwich lower <= C(W) <= upper, both in bits.

    `lower` is the mutual information achieved by `input_distribution`;
    `upper` is the value of `certificate`.  `converged` is False when the
    iteration budget ran out before the gap closed (the bracket is still
    valid in that case).
    """

    lower: float
    upper: float
    input_distribution: ProbabilityVector
    certificate: DualCertificate
    iterations: int
    converged: bool = True

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)


def dual_G(lam, W) -> float:
    """G(lambda) = max_x (W lambda - r)_x, with 0 * inf read as 0."""
    arr = as_channel_matrix(W)
    lv = np.asarray(lam, dtype=float)
    if lv.ndim != 1 or lv.size != arr.shape[1]:
        raise ValueError(f"lambda must have length {arr.shape[1]}, got shape {lv.shape}")
    r = conditional_entropy_vector(arr)
    if np.isinf(lv).any():
        with np.errstate(invalid="ignore"):
            prod = np.where(arr > 0, arr * lv[None, :], 0.0)
        wl = prod.sum(axis=1)
    else:
        wl = arr @ lv
    return float(np.max(wl - r))


def dual_F(lam) -> float:
    """F(lambda) = log2 sum_y 2^(-lambda_y), evaluated with a max-shift."""
    lv = np.asarray(lam, dtype=float)
    x = -lv
    hi = np.max(x)
    if np.isneginf(hi):
        return float("-inf")
    return float(hi + np.log2(np.exp2(x - hi).sum()))


def upper_bound_lambda0(W) -> float:
    """Dual value at lambda = 0: log2 m minus the smallest row entropy."""
    arr = as_channel_matrix(W)
    r = conditional_entropy_vector(arr)
    return float(np.log2(arr.shape[1]) - r.min())


def lower_bound_uniform(W) -> float:
    """Mutual information of the uniform input distribution."""
    arr = as_channel_matrix(W)
    return mutual_information_uniform(arr)


def mutual_information_uniform(arr: np.ndarray) -> float:
    # I(U, W) = H(colmean) - mean row entropy; avoids building a p vector.
    q = arr.mean(axis=0)
    hq = special.entr(q).sum() / LN2
    r = special.entr(arr).sum() / (LN2 * arr.shape[0])
    return float(hq - r)


def upper_bound_from_output(q, W) -> DualCertificate:
    """Dual certificate at lambda = -log2 q: value is max_x D(W_x || q).

    If q has a zero where some channel row is positive the value is the
    distinguished +inf (a valid if useless upper bound), not an error.
    """
    arr = as_channel_matrix(W)
    qv = as_probability_vector(q)
    if qv.size != arr.shape[1]:
        raise ValueError(f"output distribution length {qv.size} != number of columns {arr.shape[1]}")
    with np.errstate(divide="ignore"):
        lam = -np.log2(qv)
    per_row = special.rel_entr(arr, qv[None, :]).sum(axis=1) / LN2
    return DualCertificate(lam=lam, value=float(per_row.max()))


def solve_capacity(W, tol: float = 1e-6, max_iter: int = 10_000) -> CapacityBracket:
    """Tighten the capacity bracket to `tol` bits by alternating minimization.

    Starting from the uniform input (the natural lower-bound witness), each
    sweep scales p(x) by 2^(D(W_x || pW)) and renormalizes; the dual is
    evaluated at the induced output distribution after every sweep.  The
    lower bound is nondecreasing across sweeps; the reported upper bound is
    the best certificate seen.  Non-convergence within `max_iter` returns
    the bracket with converged=False rather than raising.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    arr = as_channel_matrix(W)
    n, m = arr.shape

    with np.errstate(divide="ignore", invalid="ignore"):
        logw = np.where(arr > 0, np.log2(arr), 0.0)
    r = -(arr * logw).sum(axis=1)

    p = np.full(n, 1.0 / n)
    best_upper = np.inf
    best_q = None
    lower = -np.inf
    iterations = 0
    converged = False

    for it in range(1, max_iter + 1):
        iterations = it
        q = p @ arr
        with np.errstate(divide="ignore", invalid="ignore"):
            logq = np.where(q > 0, np.log2(q), 0.0)  # zero columns carry no row mass
        d = -r - arr @ logq  # d_x = D(W_x || q)
        lower = float(p @ d)
        upper = float(d.max())
        if upper < best_upper:
            best_upper = upper
            best_q = q
        if best_upper - lower <= tol:
            converged = True
            break
        if it == max_iter:
            break
        p = p * np.exp2(d)
        p = np.maximum(p, _P_FLOOR)
        p = p / p.sum()

    with np.errstate(divide="ignore"):
        lam = -np.log2(best_q)
    cert = DualCertificate(lam=lam, value=best_upper)
    return CapacityBracket(
        lower=lower,
        upper=best_upper,
        input_distribution=ProbabilityVector(p),
        certificate=cert,
        iterations=iterations,
        converged=converged,
    )
