"""Finite-size deviation bounds for the capacity of random channels.

The probability that the capacity (or either of its certified bounds)
deviates from the limit mu2n/mu1n - log2 mu1n by at least t is controlled
by compositions of the Bernstein-style tail kernel

    f(t, n) = exp(-n t^2 / (2 (K + T t)))

through a sum/ratio step (alpha_t), a column-sum step (beta_t) and a
Lipschitz step for the logarithm (constant L = 1/(a ln 2) on [a, inf)).
The constant `a` mixes realized row/column statistics of the sampled gain
matrix; realized_a() evaluates both pieces on a concrete sample, while
RateBoundParams carries user-supplied ex-ante lower bounds.

Values are probabilities only after clamping to 1; callers report
`clamped(raw)` next to the raw composition.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .channel import GainMatrix, normalize_rows
from .distributions import ASYMPTOTIC_ONLY, DistributionSpec, analytic_moments, second_moments

LN2 = math.log(2.0)


class InvalidRegimeError(ValueError):
    """The bound is not evaluable: a required denominator is nonpositive."""


@dataclass(frozen=True)
class BernsteinConstants:
    """Moment-growth constants (K, T) of the Bernstein condition."""

    K: float
    T: float

    def __post_init__(self):
        if not self.K > 0:
            raise ValueError(f"K must be positive, got {self.K}")
        if not self.T > 0:
            raise ValueError(f"T must be positive, got {self.T}")


@dataclass(frozen=True)
class RateBoundParams:
    """Everything the tail bounds need besides (t, n, m).

    mu1n, mu2n are the averaged first moments (mu2n in bits); a_ub and
    a_lb are lower bounds for the log-Lipschitz domains of the upper- and
    lower-bound branches respectively.
    """

    mu1n: float
    mu2n: float
    constants: BernsteinConstants
    a_ub: float
    a_lb: float

    def __post_init__(self):
        if not self.mu1n > 0:
            raise ValueError(f"mu1n must be positive, got {self.mu1n}")
        if not self.a_ub > 0:
            raise ValueError(f"a_ub must be positive, got {self.a_ub}")
        if not self.a_lb > 0:
            raise ValueError(f"a_lb must be positive, got {self.a_lb}")

    @staticmethod
    def from_spec(
        spec: DistributionSpec,
        a_ub: float,
        a_lb: float,
        K: Optional[float] = None,
        T: float = 1.0,
    ) -> "RateBoundParams":
        """Build params for an i.i.d. catalog family.

        K defaults to max(E[V^2], E[(V log2 V)^2]); T has no catalog
        default and stays user-supplied (callers should flag T=1 defaults
        in their output).
        """
        if spec.family in ASYMPTOTIC_ONLY:
            raise ValueError(f"{spec.family} is asymptotic-formula-only; tail bounds need a.s.-positive V")
        mp = analytic_moments(spec)
        if K is None:
            K = max(second_moments(spec))
        return RateBoundParams(
            mu1n=mp.mu1, mu2n=mp.mu2, constants=BernsteinConstants(K=K, T=T), a_ub=a_ub, a_lb=a_lb
        )


def tail_f(t: float, n: int, c: BernsteinConstants) -> float:
    """Tail kernel exp(-n t^2 / (2 (K + T t))); 1 at t = 0 or n = 0."""
    t = float(t)
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    if t == 0.0 or n == 0:
        return 1.0
    return math.exp(-n * t * t / (2.0 * (c.K + c.T * t)))


def alpha_t(t: float, mu1n: float, mu2n: float) -> float:
    """Deviation transfer through the ratio step.

    Branches on the sign of mu1n + mu2n; raises InvalidRegimeError when
    the selected branch's denominator is nonpositive.
    """
    t = float(t)
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    if not mu1n > 0:
        raise ValueError(f"mu1n must be positive, got {mu1n}")
    if mu1n + mu2n >= 0:
        den = mu1n * (1.0 + t) + mu2n
    else:
        den = mu1n * (1.0 - t) + mu2n
    if not den > 0:
        raise InvalidRegimeError(
            f"alpha_t denominator {den} <= 0 at t={t}, mu1n={mu1n}, mu2n={mu2n}; bound not evaluable"
        )
    return t * mu1n * mu1n / den


def beta_t(t: float, mu1n: float) -> float:
    """Deviation transfer through the column-sum step: t mu1n / (2 + t)."""
    t = float(t)
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    if not mu1n > 0:
        raise ValueError(f"mu1n must be positive, got {mu1n}")
    return t * mu1n / (2.0 + t)


def lipschitz_L(a: float) -> float:
    """Lipschitz constant of log2 on [a, inf): 1 / (a ln 2)."""
    if not a > 0:
        raise ValueError(f"a must be positive, got {a}")
    return 1.0 / (a * LN2)


def prop4_ub_tail(t: float, n: int, params: RateBoundParams) -> float:
    """Deviation bound for the lambda=0 upper bound: 2 f(alpha_{t/2}, n) + f(t/(2L), n)."""
    c = params.constants
    L = lipschitz_L(params.a_ub)
    a = alpha_t(0.5 * t, params.mu1n, params.mu2n)
    return 2.0 * tail_f(a, n, c) + tail_f(t / (2.0 * L), n, c)


def prop5_lb_tail(t: float, n: int, m: int, params: RateBoundParams) -> float:
    """Deviation bound for the uniform-input lower bound (four kernel terms)."""
    c = params.constants
    L = lipschitz_L(params.a_lb)
    a = alpha_t(0.25 * t, params.mu1n, params.mu2n)
    b = beta_t(t / (2.0 * L), params.mu1n)
    return (
        2.0 * tail_f(a, m, c)
        + tail_f(t / (4.0 * L), m, c)
        + tail_f(b, n, c)
        + tail_f(b, m, c)
    )


def theorem2_tail(t: float, n: int, m: int, params: RateBoundParams) -> float:
    """Capacity deviation bound: max of the two branch bounds.

    The upper-bound-shaped branch is evaluated at m (as in the combined
    statement), the lower-bound branch at (n, m).
    """
    return max(prop4_ub_tail(t, m, params), prop5_lb_tail(t, n, m, params))


def clamped(raw: float) -> float:
    """Clamp a raw bound composition to a reportable probability."""
    return min(float(raw), 1.0)


class RealizedA(NamedTuple):
    a_ub: float
    a_lb: float


def realized_a(V, mu1n: Optional[float] = None) -> RealizedA:
    """Realized log-Lipschitz constants of a sampled gain matrix.

    a_ub = min over rows x of {mean_y V_{x,y}, mu1n};
    a_lb = min over columns y of {sum_x W_{x,y}, n/m} for W the row
    normalization of V.  mu1n defaults to the analytic mean of V's source
    distribution.
    """
    if isinstance(V, GainMatrix):
        arr = V.entries
        if mu1n is None and V.source is not None:
            mu1n = analytic_moments(V.source).mu1
    else:
        arr = np.asarray(V, dtype=float)
    if mu1n is None:
        raise ValueError("mu1n required when the gain matrix carries no source distribution")
    n, m = arr.shape
    row_means = arr.mean(axis=1)
    if not np.all(row_means > 0):
        raise ValueError("gain matrix has a zero-sum row")
    col_sums = normalize_rows(arr).entries.sum(axis=0)
    a_ub = min(float(row_means.min()), float(mu1n))
    a_lb = min(float(col_sums.min()), n / m)
    return RealizedA(a_ub=a_ub, a_lb=a_lb)
