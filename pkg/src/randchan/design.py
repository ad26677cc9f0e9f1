"""Experiment selection for lognormal random observation channels.

An experiment is a random channel whose gain entries are lognormal with
parameters (z, sigma^2) constrained through the implied mean and
variance.  The expected information gain of any experiment in the family
is asymptotically at most sigma*^2 / (2 ln 2) with
sigma*^2 = ln(u2 / l1^2 + 1), attained at mean = l1, variance = u2; the
bound is tight for a uniform prior.  Monte-Carlo evaluators compare that
closed-form pick against a per-trial grid supremum at finite alphabet
sizes.
"""

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Tuple

import numpy as np
from scipy import special

from .channel import LN2, as_probability_vector
from .distributions import MomentPair, phi_entropy
from .rng import mix_seed, stream_uniforms


@dataclass(frozen=True)
class LognormalFamilyConstraints:
    """Mean in [l1, u1] and variance in [l2, u2] for the gain entries.

    Any box with l1 > 0, u1 >= l1, u2 >= l2 >= 0 is feasible: fixing the
    squared-mean proxy alpha = exp(2z + sigma^2) anywhere in [l1^2, u1^2],
    the variance (exp(sigma^2) - 1) alpha sweeps all of [0, inf) in
    sigma^2, so it can always be placed inside [l2, u2].
    """

    l1: float
    u1: float
    l2: float
    u2: float

    def __post_init__(self):
        if not self.l1 > 0:
            raise ValueError(f"l1 must be positive, got {self.l1}")
        if not self.u1 >= self.l1:
            raise ValueError(f"u1 must be >= l1, got u1={self.u1}, l1={self.l1}")
        if not self.l2 >= 0:
            raise ValueError(f"l2 must be nonnegative, got {self.l2}")
        if not self.u2 >= self.l2:
            raise ValueError(f"u2 must be >= l2, got u2={self.u2}, l2={self.l2}")

    def sigma2_interval(self) -> Tuple[float, float]:
        """Feasible sigma^2 range [ln(1 + l2/u1^2), ln(1 + u2/l1^2)]."""
        return math.log1p(self.l2 / self.u1**2), math.log1p(self.u2 / self.l1**2)

    def contains(self, z: float, sigma2: float, rtol: float = 1e-9) -> bool:
        mean, var = lognormal_mean_variance(z, sigma2)
        pad1 = rtol * max(1.0, abs(self.u1))
        pad2 = rtol * max(1.0, abs(self.u2))
        return (
            self.l1 - pad1 <= mean <= self.u1 + pad1
            and self.l2 - pad2 <= var <= self.u2 + pad2
        )


@dataclass(frozen=True)
class DesignOptimum:
    """Asymptotically optimal parameters and the information-gain bound."""

    z_star: float
    sigma2_star: float
    bound_bits: float

    def __post_init__(self):
        if not self.sigma2_star >= 0:
            raise ValueError(f"sigma2_star must be nonnegative, got {self.sigma2_star}")
        expected = self.sigma2_star / (2.0 * LN2)
        if abs(self.bound_bits - expected) > 1e-12:
            raise ValueError(f"bound_bits {self.bound_bits} != sigma2_star/(2 ln 2) = {expected}")


def lognormal_mean_variance(z: float, sigma2: float) -> Tuple[float, float]:
    """Mean exp(z + s2/2) and variance (exp(s2) - 1) exp(2z + s2)."""
    if sigma2 < 0:
        raise ValueError(f"sigma2 must be nonnegative, got {sigma2}")
    mean = math.exp(z + 0.5 * sigma2)
    var = math.expm1(sigma2) * math.exp(2.0 * z + sigma2)
    return mean, var


def lognormal_moment_map(param: Tuple[float, float]) -> MomentPair:
    """(z, sigma^2) -> (mu1, mu2) for the gain-entry distribution; mu2 in bits."""
    z, sigma2 = param
    mu1 = math.exp(z + 0.5 * sigma2)
    return MomentPair(mu1, (z + sigma2) / LN2 * mu1)


def design_optimum(c: LognormalFamilyConstraints) -> DesignOptimum:
    """Closed-form maximizer of the asymptotic information gain.

    The variance constraint binds at u2 with the squared-mean proxy at
    l1^2, giving sigma*^2 = ln(u2/l1^2 + 1) and the bound
    sigma*^2 / (2 ln 2).
    """
    sigma2 = math.log1p(c.u2 / c.l1**2)
    alpha = c.l1**2
    z = 0.5 * (math.log(alpha) - sigma2)
    return DesignOptimum(z_star=z, sigma2_star=sigma2, bound_bits=sigma2 / (2.0 * LN2))


def lognormal_family_grid(
    c: LognormalFamilyConstraints, resolution: float = 0.05
) -> list:
    """Feasible (z, sigma^2) grid stepping sigma^2 at `resolution`.

    Both interval endpoints are included, so the asymptotic optimizer is
    always on the grid.  z is eliminated through the squared-mean proxy
    (pinned at l1^2 where feasible).
    """
    if not resolution > 0:
        raise ValueError(f"resolution must be positive, got {resolution}")
    lo, hi = c.sigma2_interval()
    if hi <= lo:
        sig2s = [lo]
    else:
        count = int(math.ceil((hi - lo) / resolution)) + 1
        sig2s = np.linspace(lo, hi, count).tolist()
    grid = []
    for s2 in sig2s:
        growth = math.expm1(s2)
        alpha = c.l1**2
        if growth > 0:
            alpha = min(max(alpha, c.l2 / growth), c.u1**2, c.u2 / growth)
        z = 0.5 * (math.log(alpha) - s2)
        grid.append((z, s2))
    return grid


def family_gain_upper_bound(moment_map: Callable, domain: Iterable) -> float:
    """sup over the domain of Ent(V)/E[V] for the supplied moment map."""
    best = None
    for param in domain:
        mp = moment_map(param)
        val = phi_entropy(mp) / mp.mu1
        if best is None or val > best:
            best = val
    if best is None:
        raise ValueError("empty search domain")
    return float(best)


def _trial_normals(seed: int, trial: int, n: int) -> np.ndarray:
    """n x n standard normals for one trial; row-keyed under the trial subseed."""
    trial_seed = mix_seed(seed, trial)
    z = np.empty((n, n))
    for x in range(n):
        with np.errstate(divide="ignore"):
            z[x] = special.ndtri(stream_uniforms(trial_seed, x, n))
    return z


def _information_gain(prior: np.ndarray, z: float, sigma2: float, normals: np.ndarray) -> float:
    """I(prior, W) for W the row normalization of exp(z + sigma * normals).

    Uses log2 V = (z + sigma * Z) / ln 2 to avoid re-taking elementwise
    logs of the gain matrix.
    """
    if sigma2 == 0.0:
        return 0.0  # constant gains: every row uniform, output independent of input
    sigma = math.sqrt(sigma2)
    v = np.exp(z + sigma * normals)
    s = v.sum(axis=1)
    # per-row sum of W log2 W, via sum of V log2 V = sum V (z + sigma Z)/ln2
    vlogv = (v * (z + sigma * normals)).sum(axis=1) / LN2
    neg_r = vlogv / s - np.log2(s)
    q = prior @ (v / s[:, None])
    hq = float(special.entr(q).sum() / LN2)
    return hq + float(prior @ neg_r)


def evaluate_experiment(
    prior, z: float, sigma2: float, n: int, trials: int, seed: int
) -> np.ndarray:
    """Per-trial information gains of the experiment (z, sigma^2) at size n.

    Each trial samples a fresh n x n lognormal gain matrix (deterministic
    per (seed, trial index)), normalizes it, and evaluates the mutual
    information under `prior`.
    """
    pv = as_probability_vector(prior)
    if pv.size != n:
        raise ValueError(f"prior length {pv.size} != n = {n}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if sigma2 < 0:
        raise ValueError(f"sigma2 must be nonnegative, got {sigma2}")
    gains = np.empty(trials)
    for t in range(trials):
        normals = _trial_normals(seed, t, n)
        gains[t] = _information_gain(pv, z, sigma2, normals)
    return gains


def optimal_gain_search(
    prior,
    c: LognormalFamilyConstraints,
    n: int,
    resolution: float = 0.05,
    trials: int = 1,
    seed: int = 0,
    grid: Sequence = None,
) -> np.ndarray:
    """Per-trial maxima of the information gain over the feasible grid.

    Every grid point reuses the trial's own gain noise (the same
    underlying normals), so the per-trial maximum dominates the gain of
    any single grid member, in particular the asymptotically optimal one.
    """
    pv = as_probability_vector(prior)
    if pv.size != n:
        raise ValueError(f"prior length {pv.size} != n = {n}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if grid is None:
        grid = lognormal_family_grid(c, resolution)
    if len(grid) == 0:
        raise ValueError("empty search grid")
    maxima = np.empty(trials)
    for t in range(trials):
        normals = _trial_normals(seed, t, n)
        maxima[t] = max(_information_gain(pv, z, s2, normals) for z, s2 in grid)
    return maxima
