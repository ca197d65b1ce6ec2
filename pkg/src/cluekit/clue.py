"""Variance-based measures of how much a coordinate subset tells about a
function: clue, significance, set influence, witness, coordinate influence,
the total-variation variant, and expected clue of random subsets.

clue(f | U) = Var(E[f | U]) / Var(f) is the master quantity; everything else
is either a dual (sig), a combinatorial relative (influence / witness), or a
renormalization (TV).  A degenerate (constant) function raises
:class:`~cluekit.errors.DegenerateError` rather than returning 0.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    FunctionTable,
    RandomSetDistribution,
    complement_mask,
    conditional_expectation,
    correlation,
    expectation,
    validate_mask,
    variance,
)
from .errors import DegenerateError
from .spectral import SpectralDistribution, subset_weights
from .transforms import subset_zeta

_VAR_FLOOR = 1e-14


def _checked_variance(f: FunctionTable) -> float:
    var = variance(f)
    scale = max(1.0, float(np.max(np.abs(f.values))) ** 2)
    if var <= _VAR_FLOOR * scale:
        raise DegenerateError("constant function: clue-type ratios are undefined")
    return var


# ---------------------------------------------------------------------------
# the L^2 clue, by fibers and by spectral weights
# ---------------------------------------------------------------------------
def clue(f: FunctionTable, mask: int) -> float:
    """Fraction of the variance of f explained by the coordinates in mask.

    Equals the squared correlation between f and E[f | mask].
    """
    validate_mask(mask, f.n)
    var = _checked_variance(f)
    return variance(conditional_expectation(f, mask)) / var


def clue_spectral(dist: SpectralDistribution, mask: int) -> float:
    """P[sample subseteq mask | sample nonempty], from a conditioned spectral
    distribution.  Agrees with :func:`clue` on product measures."""
    if not dist.conditioned:
        raise ValueError("clue_spectral needs a distribution conditioned on nonempty")
    validate_mask(mask, dist.space.n)
    total = 0.0
    sub = mask
    while True:
        total += dist.mass[sub]
        if sub == 0:
            return float(total)
        sub = (sub - 1) & mask


def clue_all_subsets(dist: SpectralDistribution) -> np.ndarray:
    """clue for every mask at once via the subset-zeta transform."""
    if not dist.conditioned:
        raise ValueError("clue_all_subsets needs a conditioned distribution")
    return subset_zeta(dist.mass)


def clue_all_subsets_table(f: FunctionTable) -> np.ndarray:
    """clue(f | mask) for every mask, via subset weights (any product measure)."""
    _, weights = subset_weights(f)
    var = _checked_variance(f)
    zeta = subset_zeta(weights)
    return (zeta - weights[0]) / var


# ---------------------------------------------------------------------------
# significance: the dual of clue
# ---------------------------------------------------------------------------
def sig(f: FunctionTable, mask: int) -> float:
    """Normalized residual variance left after seeing the complement:
    1 - clue(f | mask^c)."""
    return 1.0 - clue(f, complement_mask(mask, f.n))


def sig_spectral(dist: SpectralDistribution, mask: int) -> float:
    """P[sample meets mask], the spectral form of significance."""
    n = dist.space.n
    return 1.0 - clue_spectral(dist, complement_mask(mask, n))


# ---------------------------------------------------------------------------
# determinacy: set influence and witness
# ---------------------------------------------------------------------------
def _fiber_constancy_probability(f: FunctionTable, fixed: int, tol: float) -> float:
    """Probability (over the fixed coordinates' marginal) that f is constant
    on the fiber, constancy judged over positive-probability completions."""
    space = f.space
    varying = complement_mask(fixed, space.n)
    t = f.values.reshape(space.tensor_shape())
    fixed_coords = [v for v in range(space.n) if (fixed >> v) & 1]
    vary_coords = [v for v in range(space.n) if (varying >> v) & 1]
    order = [space.axis_of(v) for v in reversed(fixed_coords)] + [
        space.axis_of(v) for v in reversed(vary_coords)
    ]
    grid = np.transpose(t, order).reshape(space.q ** len(fixed_coords), -1)
    w_vary = np.array([1.0])
    for v in reversed(vary_coords):
        w_vary = np.kron(w_vary, space.pi[v])
    support = w_vary > 0.0
    if not np.any(support):
        return 1.0
    cols = grid[:, support]
    spread = cols.max(axis=1) - cols.min(axis=1)
    constant = spread <= tol
    w_fixed = np.array([1.0])
    for v in reversed(fixed_coords):
        w_fixed = np.kron(w_fixed, space.pi[v])
    return float(w_fixed @ constant.astype(float))


def _require_boolean(f: FunctionTable):
    if not f.is_boolean():
        raise ValueError("this metric is defined for Boolean tables only")


def influence_set(f: FunctionTable, mask: int) -> float:
    """P[f is not determined by the coordinates outside mask]."""
    _require_boolean(f)
    validate_mask(mask, f.n)
    return 1.0 - _fiber_constancy_probability(f, complement_mask(mask, f.n), 0.0)


def witness(f: FunctionTable, mask: int) -> float:
    """P[the coordinates in mask alone determine f]."""
    _require_boolean(f)
    validate_mask(mask, f.n)
    return _fiber_constancy_probability(f, mask, 0.0)


def influence_coordinate(f: FunctionTable, coord: int) -> float:
    """Flip-disagreement probability of a single coordinate (binary spaces)."""
    _require_boolean(f)
    space = f.space
    if space.q != 2:
        raise ValueError("coordinate influence needs a binary space")
    idx = np.arange(space.size)
    flipped = f.values[idx ^ (1 << coord)]
    return float(space.config_weights() @ (f.values != flipped).astype(float))


# ---------------------------------------------------------------------------
# total-variation clue
# ---------------------------------------------------------------------------
def tv_clue(f: FunctionTable, mask: int) -> float:
    """E|E[f|mask] - E[f]| / E|f - E[f]| (symmetric and asymmetric variants
    of the underlying distance coincide in this ratio)."""
    validate_mask(mask, f.n)
    w = f.space.config_weights()
    mean = expectation(f)
    denom = float(w @ np.abs(f.values - mean))
    if denom <= 0.0:
        raise DegenerateError("constant function: TV clue undefined")
    num = float(w @ np.abs(conditional_expectation(f, mask).values - mean))
    return num / denom


def p_min(f: FunctionTable) -> float:
    """min(P[f=1], P[f=0]) of the {0,1} normalization of a Boolean table."""
    ind = f.as_indicator()
    p = expectation(ind)
    return min(p, 1.0 - p)


# ---------------------------------------------------------------------------
# random subsets
# ---------------------------------------------------------------------------
def expected_clue(f: FunctionTable, dist: RandomSetDistribution) -> float:
    """Average clue over a random subset drawn independently of the input."""
    if dist.n != f.n:
        raise ValueError("distribution and table disagree on n")
    _checked_variance(f)
    return float(sum(p * clue(f, mask) for mask, p in dist.atoms if p > 0.0))


# ---------------------------------------------------------------------------
# projection distortion
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class ProjectionDistortionReport:
    eps: float
    clue_f: float
    clue_g: float
    corr_fg: float
    corr_projected: float | None
    min_clue_bound_ok: bool
    transfer_bound_ok: bool
    naive_transfer_gap: float


def _transfer_floor(c: float, eps: float) -> float:
    """Provable lower bound on the partner's clue when Corr >= 1 - eps and
    one clue is >= c.  Standardize both functions: the distance between them
    is sqrt(2 eps), and by the triangle inequality the residual of g is at
    most (sqrt(2 eps) + sqrt(1 - c))^2.  The cross term cannot be dropped,
    so the floor is c - 2 eps - 2 sqrt(2 eps (1 - c)), not c - 2 eps.
    """
    eps = max(eps, 0.0)
    return c - 2.0 * eps - 2.0 * np.sqrt(2.0 * eps * max(1.0 - c, 0.0))


def projection_distortion_check(
    f: FunctionTable, g: FunctionTable, mask: int, tol: float = 1e-9
) -> ProjectionDistortionReport:
    """Check the two projection bounds on a concrete pair.

    With eps = 1 - Corr(f, g) and c = min clue of the pair on ``mask``:
    the projected pair keeps Corr(Pf, Pg) >= 1 - eps/c whenever c > 0, and
    each function's clue is at least the other's transfer floor
    (see :func:`_transfer_floor`).  Both clue and correlation are affine
    invariant, so the check normalizes nothing.  ``naive_transfer_gap``
    records min(clue_g - (clue_f - 2 eps), symmetric counterpart): it is
    reported because the simpler floor c - 2 eps is sometimes quoted, but
    it can go slightly negative and is not asserted.
    """
    cf = clue(f, mask)
    cg = clue(g, mask)
    eps = 1.0 - correlation(f, g)
    pf = conditional_expectation(f, mask)
    pg = conditional_expectation(g, mask)
    c = min(cf, cg)
    corr_projected = None
    min_clue_bound_ok = True
    if c > tol:
        corr_projected = correlation(pf, pg)
        min_clue_bound_ok = corr_projected >= 1.0 - eps / c - tol
    transfer_bound_ok = (cg >= _transfer_floor(cf, eps) - tol) and (
        cf >= _transfer_floor(cg, eps) - tol
    )
    return ProjectionDistortionReport(
        eps=eps,
        clue_f=cf,
        clue_g=cg,
        corr_fg=1.0 - eps,
        corr_projected=corr_projected,
        min_clue_bound_ok=bool(min_clue_bound_ok),
        transfer_bound_ok=bool(transfer_bound_ok),
        naive_transfer_gap=float(min(cg - (cf - 2 * eps), cf - (cg - 2 * eps))),
    )


# ---------------------------------------------------------------------------
# bundled report for the CLI
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class ClueReport:
    l2_clue: float
    sig: float
    influence_set: float | None
    witness: float | None
    tv_clue: float
    p_min: float | None
    degenerate_fibers: bool


def clue_report(f: FunctionTable, mask: int) -> ClueReport:
    boolean = f.is_boolean()
    return ClueReport(
        l2_clue=clue(f, mask),
        sig=sig(f, mask),
        influence_set=influence_set(f, mask) if boolean else None,
        witness=witness(f, mask) if boolean else None,
        tv_clue=tv_clue(f, mask),
        p_min=p_min(f) if boolean else None,
        degenerate_fibers=f.space.has_zero_atoms,
    )
