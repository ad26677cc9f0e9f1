"""Distribution catalog for random-channel construction.

Each family carries a deterministic inverse-CDF sampler and closed-form
first moments mu1 = E[V] and mu2 = E[V log2 V] (bits).  The normalized
channel built from i.i.d. draws of any catalog family has capacity
converging to mu2/mu1 - log2 mu1 as the alphabet grows; that limit equals
Ent(V)/E[V] with Ent the (u log u)-entropy of V.

The two discrete families (two_point, point_mass) exist to exercise the
extremes of the limit formula (zero and arbitrarily large); they are
flagged `asymptotic-formula-only` and rejected by the finite-size tail
machinery in ratebounds.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict

import numpy as np
from scipy import integrate, special

from .channel import LN2, GainMatrix
from .rng import stream_uniforms
from .special import EULER_GAMMA, digamma, harmonic


@dataclass(frozen=True)
class MomentPair:
    """mu1 = E[V] and mu2 = E[V log2 V] (bits)."""

    mu1: float
    mu2: float

    def __post_init__(self):
        if not self.mu1 > 0:
            raise ValueError(f"mu1 must be positive, got {self.mu1}")

    def __iter__(self):
        return iter((self.mu1, self.mu2))


def _positive(name, value):
    v = float(value)
    if not (math.isfinite(v) and v > 0):
        raise ValueError(f"{name} must be a positive finite real, got {value}")
    return v


def _validate_exponential(p):
    return {"rate": _positive("rate", p["rate"])}


def _validate_uniform(p):
    return {"support_max": _positive("support_max", p["support_max"])}


def _validate_lognormal(p):
    z = float(p["z"])
    if not math.isfinite(z):
        raise ValueError(f"z must be finite, got {p['z']}")
    return {"z": z, "sigma": _positive("sigma", p["sigma"])}


def _validate_gamma(p):
    return {"shape": _positive("shape", p["shape"]), "scale": _positive("scale", p["scale"])}


def _validate_chi_squared(p):
    k = p["dof"]
    if int(k) != k or int(k) < 1:
        raise ValueError(f"dof must be a positive integer, got {k}")
    return {"dof": int(k)}


def _validate_beta(p):
    return {"alpha": _positive("alpha", p["alpha"]), "beta": _positive("beta", p["beta"])}


def _validate_two_point(p):
    eps = float(p["eps"])
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    return {"eps": eps}


def _validate_point_mass(p):
    return {"value": _positive("value", p["value"])}


_VALIDATORS: Dict[str, Callable] = {
    "exponential": _validate_exponential,
    "uniform": _validate_uniform,
    "lognormal": _validate_lognormal,
    "gamma": _validate_gamma,
    "chi_squared": _validate_chi_squared,
    "beta": _validate_beta,
    "two_point": _validate_two_point,
    "point_mass": _validate_point_mass,
}

# Families whose asymptotic-capacity formula applies but which are not
# accepted by the finite-size tail bounds.
ASYMPTOTIC_ONLY = frozenset({"two_point", "point_mass"})


@dataclass(frozen=True)
class DistributionSpec:
    """A catalog family plus validated parameters."""

    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in _VALIDATORS:
            raise ValueError(f"unknown family {self.family!r}; known: {sorted(_VALIDATORS)}")
        object.__setattr__(self, "params", _VALIDATORS[self.family](dict(self.params)))

    @property
    def supports_rate_bounds(self) -> bool:
        return self.family not in ASYMPTOTIC_ONLY

    def to_dict(self) -> dict:
        return {"family": self.family, "params": dict(self.params)}

    @staticmethod
    def from_dict(d: dict) -> "DistributionSpec":
        return DistributionSpec(d["family"], dict(d.get("params", {})))


def exponential(rate: float) -> DistributionSpec:
    return DistributionSpec("exponential", {"rate": rate})


def uniform(support_max: float) -> DistributionSpec:
    return DistributionSpec("uniform", {"support_max": support_max})


def lognormal(z: float, sigma: float) -> DistributionSpec:
    return DistributionSpec("lognormal", {"z": z, "sigma": sigma})


def gamma(shape: float, scale: float) -> DistributionSpec:
    return DistributionSpec("gamma", {"shape": shape, "scale": scale})


def chi_squared(dof: int) -> DistributionSpec:
    return DistributionSpec("chi_squared", {"dof": dof})


def beta(alpha: float, beta_: float) -> DistributionSpec:
    return DistributionSpec("beta", {"alpha": alpha, "beta": beta_})


def two_point(eps: float) -> DistributionSpec:
    return DistributionSpec("two_point", {"eps": eps})


def point_mass(value: float) -> DistributionSpec:
    return DistributionSpec("point_mass", {"value": value})


def transform_uniforms(spec: DistributionSpec, u: np.ndarray) -> np.ndarray:
    """Map uniforms in [0, 1) to draws of `spec` by the inverse CDF."""
    p = spec.params
    f = spec.family
    if f == "exponential":
        return -np.log1p(-u) / p["rate"]
    if f == "uniform":
        return p["support_max"] * u
    if f == "lognormal":
        with np.errstate(divide="ignore"):  # u == 0 maps to V == 0
            return np.exp(p["z"] + p["sigma"] * special.ndtri(u))
    if f == "gamma":
        return p["scale"] * special.gammaincinv(p["shape"], u)
    if f == "chi_squared":
        return 2.0 * special.gammaincinv(0.5 * p["dof"], u)
    if f == "beta":
        return special.betaincinv(p["alpha"], p["beta"], u)
    if f == "two_point":
        return (u < p["eps"]).astype(float)
    if f == "point_mass":
        return np.full_like(u, p["value"])
    raise AssertionError(f"unhandled family {f}")


def output_size(n: int, gamma_ratio: float) -> int:
    """m = ceil(gamma * n), guarding the ceiling against float fuzz."""
    g = gamma_ratio * n
    nearest = round(g)
    if abs(g - nearest) < 1e-9:
        return int(nearest)
    return int(math.ceil(g))


def sample_gain_matrix(spec: DistributionSpec, n: int, gamma_ratio: float, seed: int) -> GainMatrix:
    """n x ceil(gamma * n) matrix of i.i.d. draws from `spec`.

    Row x is generated from its own (seed, x)-keyed stream, so output is
    identical for identical (spec, n, gamma, seed) no matter how the rows
    are partitioned across workers.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not gamma_ratio > 0:
        raise ValueError(f"gamma must be positive, got {gamma_ratio}")
    m = output_size(int(n), float(gamma_ratio))
    out = np.empty((int(n), m))
    for x in range(int(n)):
        out[x] = transform_uniforms(spec, stream_uniforms(seed, x, m))
    return GainMatrix(out, source=spec, seed=int(seed))


def analytic_moments(spec: DistributionSpec) -> MomentPair:
    """Closed-form (mu1, mu2) for the catalog family; mu2 in bits."""
    p = spec.params
    f = spec.family
    if f == "exponential":
        lam = p["rate"]
        return MomentPair(1.0 / lam, (1.0 - EULER_GAMMA - math.log(lam)) / (lam * LN2))
    if f == "uniform":
        a = p["support_max"]
        return MomentPair(a / 2.0, a * (2.0 * math.log(a) - 1.0) / (4.0 * LN2))
    if f == "lognormal":
        z, s = p["z"], p["sigma"]
        mu1 = math.exp(z + 0.5 * s * s)
        return MomentPair(mu1, (z + s * s) / LN2 * mu1)
    if f == "gamma":
        k, th = p["shape"], p["scale"]
        return MomentPair(k * th, k * th * (digamma(1.0 + k) + math.log(th)) / LN2)
    if f == "chi_squared":
        k = p["dof"]
        return MomentPair(float(k), k + k / LN2 * digamma(1.0 + 0.5 * k))
    if f == "beta":
        a, b = p["alpha"], p["beta"]
        mu1 = a / (a + b)
        return MomentPair(mu1, mu1 * (harmonic(a) - harmonic(a + b)) / LN2)
    if f == "two_point":
        return MomentPair(p["eps"], 0.0)
    if f == "point_mass":
        v = p["value"]
        return MomentPair(v, v * math.log2(v))
    raise AssertionError(f"unhandled family {f}")


def phi_entropy(m: MomentPair) -> float:
    """Ent(V) = E[V log2 V] - E[V] log2 E[V], bits; >= 0 by Jensen."""
    return m.mu2 - m.mu1 * math.log2(m.mu1)


def asymptotic_capacity(spec: DistributionSpec) -> float:
    """Large-alphabet capacity limit mu2/mu1 - log2 mu1 = Ent(V)/E[V], bits."""
    m = analytic_moments(spec)
    return m.mu2 / m.mu1 - math.log2(m.mu1)


def empirical_moments(spec: DistributionSpec, count: int, seed: int) -> MomentPair:
    """Monte-Carlo (mu1, mu2) over `count` i.i.d. draws; cross-checks the closed forms."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    v = transform_uniforms(spec, stream_uniforms(seed, 0, int(count)))
    mu1 = float(v.mean())
    mu2 = float(special.xlogy(v, v).mean() / LN2)
    return MomentPair(mu1, mu2)


def _pdf(spec: DistributionSpec):
    p = spec.params
    f = spec.family
    if f == "exponential":
        lam = p["rate"]
        return (lambda v: lam * np.exp(-lam * v)), 0.0, np.inf
    if f == "uniform":
        a = p["support_max"]
        return (lambda v: 1.0 / a), 0.0, a
    if f == "lognormal":
        z, s = p["z"], p["sigma"]
        c = 1.0 / (s * math.sqrt(2.0 * math.pi))
        return (lambda v: c / v * np.exp(-((np.log(v) - z) ** 2) / (2.0 * s * s))), 0.0, np.inf
    if f == "gamma":
        k, th = p["shape"], p["scale"]
        c = 1.0 / (special.gamma(k) * th**k)
        return (lambda v: c * v ** (k - 1.0) * np.exp(-v / th)), 0.0, np.inf
    if f == "chi_squared":
        k = 0.5 * p["dof"]
        c = 1.0 / (special.gamma(k) * 2.0**k)
        return (lambda v: c * v ** (k - 1.0) * np.exp(-0.5 * v)), 0.0, np.inf
    if f == "beta":
        a, b = p["alpha"], p["beta"]
        c = 1.0 / special.beta(a, b)
        return (lambda v: c * v ** (a - 1.0) * (1.0 - v) ** (b - 1.0)), 0.0, 1.0
    raise ValueError(f"{f} has no density")


def second_moments(spec: DistributionSpec) -> tuple:
    """(E[V^2], E[(V log2 V)^2]); the default Bernstein scale constant.

    Discrete families are exact; continuous families are integrated with
    adaptive quadrature against the closed-form density.
    """
    f = spec.family
    if f == "point_mass":
        v = spec.params["value"]
        return v * v, (v * math.log2(v)) ** 2
    if f == "two_point":
        return spec.params["eps"], 0.0
    pdf, lo, hi = _pdf(spec)
    ev2, _ = integrate.quad(lambda v: v * v * pdf(v), lo, hi, limit=200)
    evlog2, _ = integrate.quad(
        lambda v: (special.xlogy(v, v) / LN2) ** 2 * pdf(v), lo, hi, limit=200
    )
    return float(ev2), float(evlog2)
