"""Orthogonal decompositions of functions on product spaces and the
distributions they induce on coordinate subsets.

Two routes produce the same subset weights:

* the Walsh butterfly transform, for uniform binary spaces, giving character
  coefficients per subset mask in O(n 2^n);
* the variance-of-projection Moebius route, valid for any product measure,
  giving the squared norms of the orthogonal components per mask.

Squared weights normalized to a probability measure form the spectral
distribution; a uniformly random element of a sample from it drives the
transitive upper bounds checked in the clue module.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    FunctionTable,
    ProductSpace,
    conditional_marginal,
    covariance,
    validate_mask,
)
from .errors import DegenerateError, GuardError
from .transforms import popcounts, subset_mobius, subset_zeta

NEG_CLAMP = 1e-12
COMPONENT_TABLE_GATE = 10
MONOTONE_GATE = 8


# ---------------------------------------------------------------------------
# Walsh transform (uniform binary spaces)
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class FourierExpansion:
    """Character coefficients per subset mask; coeffs[0] is the mean."""

    space: ProductSpace
    coeffs: np.ndarray = field(repr=False)


def walsh_hadamard(f: FunctionTable) -> FourierExpansion:
    """Butterfly transform of a table on a uniform binary space.

    The character of mask S at a configuration is the product of the spins in
    S (digit 0 = spin -1).  Inverse is :func:`inverse_walsh_hadamard`.
    """
    space = f.space
    if not space.is_uniform_binary:
        raise GuardError(
            "walsh_hadamard requires q=2 with the uniform measure; "
            "use efron_stein for general product measures"
        )
    arr = f.values.copy()
    for v in range(space.n):
        view = arr.reshape(-1, 2, 1 << v)
        lo = view[:, 0, :].copy()
        hi = view[:, 1, :].copy()
        view[:, 0, :] = (lo + hi) / 2.0
        view[:, 1, :] = (hi - lo) / 2.0
    return FourierExpansion(space, arr)


def inverse_walsh_hadamard(expansion: FourierExpansion) -> FunctionTable:
    arr = expansion.coeffs.copy()
    n = expansion.space.n
    for v in range(n):
        view = arr.reshape(-1, 2, 1 << v)
        lo = view[:, 0, :].copy()
        hi = view[:, 1, :].copy()
        view[:, 0, :] = lo - hi
        view[:, 1, :] = lo + hi
    return FunctionTable(expansion.space, arr)


# ---------------------------------------------------------------------------
# orthogonal components under a general product measure
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class EfronSteinComponents:
    """Squared norms of the orthogonal components, one per subset mask.

    ``tables`` is only materialized on request (full component functions,
    shape (2^n, q^n)); the norms alone feed every downstream formula.
    """

    space: ProductSpace
    norms: np.ndarray = field(repr=False)
    tables: np.ndarray | None = field(default=None, repr=False)


def projection_norms(f: FunctionTable) -> np.ndarray:
    """||E[f | mask]||^2 for every mask, length 2^n."""
    space = f.space
    space.check_exact_guard()
    out = np.empty(1 << space.n)
    for mask in range(1 << space.n):
        vals, w = conditional_marginal(f, mask)
        out[mask] = float(w @ (vals**2))
    return out


def efron_stein(f: FunctionTable, materialize: bool = False) -> EfronSteinComponents:
    """Moebius inversion of mask -> ||E[f | mask]||^2.

    Under any product measure the inverted masses are nonnegative; values in
    (-1e-12, 0) are clamped to 0, anything more negative is an error (it
    signals a non-product measure smuggled in).
    """
    space = f.space
    norms = subset_mobius(projection_norms(f))
    low = norms.min()
    if low < -NEG_CLAMP:
        raise ValueError(
            f"component mass {low} below -1e-12: measure is not a product measure"
        )
    norms = np.maximum(norms, 0.0)
    tables = None
    if materialize:
        if space.n > COMPONENT_TABLE_GATE:
            raise GuardError("full component tables gated at n <= 10")
        from .core import conditional_expectation

        cond = np.stack(
            [conditional_expectation(f, mask).values for mask in range(1 << space.n)]
        )
        tables = subset_mobius(cond)
    return EfronSteinComponents(space, norms, tables)


# ---------------------------------------------------------------------------
# spectral distribution over subset masks
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class SpectralDistribution:
    """Probability mass per subset mask, optionally conditioned on being
    nonempty (mass[0] = 0, normalized by the variance)."""

    space: ProductSpace
    mass: np.ndarray = field(repr=False)
    conditioned: bool = False

    def __post_init__(self):
        mass = np.asarray(self.mass, dtype=float)
        if mass.min() < -NEG_CLAMP:
            raise ValueError("spectral masses must be nonnegative")
        mass = np.maximum(mass, 0.0)
        if abs(mass.sum() - 1.0) > 1e-10:
            raise ValueError("spectral masses must sum to 1")
        mass.setflags(write=False)
        object.__setattr__(self, "mass", mass)


def subset_weights(source: FunctionTable | FourierExpansion | EfronSteinComponents) -> tuple[ProductSpace, np.ndarray]:
    """Unnormalized squared weight per mask from any of the three carriers."""
    if isinstance(source, FunctionTable):
        if source.space.is_uniform_binary:
            source = walsh_hadamard(source)
        else:
            source = efron_stein(source)
    if isinstance(source, FourierExpansion):
        return source.space, source.coeffs**2
    if isinstance(source, EfronSteinComponents):
        return source.space, source.norms.copy()
    raise TypeError(f"cannot derive subset weights from {type(source).__name__}")


def spectral_distribution(source, conditioned: bool = False) -> SpectralDistribution:
    space, weights = subset_weights(source)
    if conditioned:
        weights = weights.copy()
        weights[0] = 0.0
        total = weights.sum()
        if total <= 0.0:
            raise DegenerateError("constant function: conditioned spectral sample undefined")
    else:
        total = weights.sum()
        if total <= 0.0:
            raise DegenerateError("zero function has no spectral distribution")
    return SpectralDistribution(space, weights / total, conditioned)


def spectral_marginal(dist: SpectralDistribution, coord: int) -> float:
    """P[X = coord] for X a uniform element of the conditioned sample:
    sum over masks containing coord of mass/|mask|."""
    if not dist.conditioned:
        raise ValueError("marginal of the uniform element needs a conditioned distribution")
    n = dist.space.n
    pc = popcounts(n)
    masks = np.arange(1 << n)
    sel = ((masks >> coord) & 1) == 1
    return float(np.sum(dist.mass[sel] / pc[sel]))


def spectral_marginals(dist: SpectralDistribution) -> np.ndarray:
    return np.array([spectral_marginal(dist, j) for j in range(dist.space.n)])


def sample_spectral(dist: SpectralDistribution, rng: np.random.Generator, size: int | None = None):
    """Inverse-CDF sampling over masks in ascending index order."""
    cdf = np.cumsum(dist.mass)
    u = rng.random(size if size is not None else 1)
    picks = np.searchsorted(cdf, u, side="right")
    picks = np.minimum(picks, dist.mass.size - 1)
    if size is None:
        return int(picks[0])
    return picks.astype(np.int64)


# ---------------------------------------------------------------------------
# level weights and noise stability
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class StabilityProfile:
    """W_k = total squared weight at subset size k, for k = 0..n."""

    level_weights: np.ndarray

    @property
    def variance(self) -> float:
        return float(self.level_weights[1:].sum())


def stability_profile(source) -> StabilityProfile:
    space, weights = subset_weights(source)
    pc = popcounts(space.n)
    levels = np.bincount(pc, weights=weights, minlength=space.n + 1)
    return StabilityProfile(levels)


def stability(profile: StabilityProfile, p: float) -> float:
    """sum_{k>=1} W_k p^k: covariance of the function with its p-correlated
    refresh, equivalently Var(f) times the expected clue of a Bernoulli(p)
    coordinate set."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("noise level p must lie in [0, 1]")
    w = profile.level_weights
    return float(sum(w[k] * p**k for k in range(1, len(w))))


# ---------------------------------------------------------------------------
# pivotal sets and the covariance identity
# ---------------------------------------------------------------------------
def _require_pm_one(f: FunctionTable):
    if f.space.q != 2:
        raise ValueError("pivotal sets need a binary space")
    if not set(np.unique(f.values).tolist()) <= {-1.0, 1.0}:
        raise ValueError("pivotal sets need a {-1,+1}-valued table")


def pivotal_masks(f: FunctionTable) -> np.ndarray:
    """For every configuration, the bitmask of coordinates whose flip changes
    the value."""
    _require_pm_one(f)
    n = f.space.n
    idx = np.arange(1 << n)
    piv = np.zeros(1 << n, dtype=np.int64)
    for v in range(n):
        flipped = f.values[idx ^ (1 << v)]
        piv |= (f.values != flipped).astype(np.int64) << v
    return piv


def pivotal_set(f: FunctionTable, config: int) -> int:
    return int(pivotal_masks(f)[config])


def is_monotone(f: FunctionTable) -> bool:
    """True when raising any spin never lowers the value."""
    _require_pm_one(f)
    n = f.space.n
    idx = np.arange(1 << n)
    for v in range(n):
        hi = (idx >> v) & 1 == 1
        if np.any(f.values[idx[hi]] < f.values[idx[hi] ^ (1 << v)]):
            return False
    return True


def noise_pair_weights(n: int, p: float) -> np.ndarray:
    """Joint law of (w, w') on a uniform binary space where w' keeps each
    spin with probability p and refreshes it otherwise; shape (2^n, 2^n)."""
    idx = np.arange(1 << n)
    agree = n - popcounts(n)[idx[:, None] ^ idx[None, :]]
    return ((1.0 + p) / 4.0) ** agree * ((1.0 - p) / 4.0) ** (n - agree)


def covariance_lemma_check(f: FunctionTable, g: FunctionTable) -> tuple[float, float]:
    """Exact evaluation of both sides of the pivotal-overlap identity.

    lhs: integral over p in [0,1] of E|Piv_f(w) ∩ Piv_g(w')| for the
    p-correlated pair (w, w'), computed by joint enumeration at
    Gauss-Legendre nodes (the integrand is a polynomial of degree < n, so
    ceil(n/2)+1 nodes integrate it exactly).  rhs: Cov(f, g).

    For the conventions above the two sides agree with constant 1; the
    dictator pair pins this (both sides equal 1).
    """
    n = f.space.n
    if n > MONOTONE_GATE:
        raise GuardError("covariance identity check gated at n <= 8")
    if f.space != g.space or not f.space.is_uniform_binary:
        raise ValueError("both tables must live on the same uniform binary space")
    if not (is_monotone(f) and is_monotone(g)):
        raise ValueError("covariance identity requires monotone inputs")
    piv_f = pivotal_masks(f)
    piv_g = pivotal_masks(g)
    pc = popcounts(n)
    overlap = pc[piv_f[:, None] & piv_g[None, :]].astype(float)
    nodes, gl_weights = np.polynomial.legendre.leggauss((n + 1) // 2 + 1)
    nodes = 0.5 * (nodes + 1.0)  # map [-1,1] -> [0,1]
    gl_weights = 0.5 * gl_weights
    lhs = 0.0
    for p, wq in zip(nodes, gl_weights):
        lhs += wq * float(np.sum(noise_pair_weights(n, p) * overlap))
    rhs = covariance(f, g)
    return lhs, rhs


# ---------------------------------------------------------------------------
# identities used as cross-checks
# ---------------------------------------------------------------------------
def projected_variance_from_weights(source, mask: int) -> float:
    """Var(E[f | mask]) = sum of squared weights over nonempty submasks."""
    space, weights = subset_weights(source)
    validate_mask(mask, space.n)
    zeta = subset_zeta(weights)
    return float(zeta[mask] - weights[0])
