"""Cooperative-game view of subset information: characteristic functions
from projected variance or mutual information, exact Shapley values,
supermodularity and core checks, and the transitive upper bound they imply.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .core import FunctionTable, expectation, mask_indices
from .errors import GuardError
from .infotheory import mutual_information
from .spectral import efron_stein
from .transforms import popcounts, subset_zeta

SUPERMODULAR_GATE = 10


@dataclass(frozen=True, eq=False)
class CooperativeGame:
    """Dense characteristic function over all coalitions of [n]; v(empty)=0."""

    n: int
    v: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.v, dtype=float)
        if vals.shape != (1 << self.n,):
            raise ValueError(f"need 2^{self.n} coalition values")
        if vals[0] != 0.0:
            raise ValueError("v(empty set) must be exactly 0")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "v", vals)

    @property
    def grand_value(self) -> float:
        return float(self.v[-1])


@dataclass(frozen=True, eq=False)
class ShapleyVector:
    phi: np.ndarray

    @property
    def total(self) -> float:
        return float(self.phi.sum())


def build_clue_game(f: FunctionTable) -> CooperativeGame:
    """v(S) = Var(E[f | S]), assembled by a subset-zeta over component norms."""
    components = efron_stein(f)
    zeta = subset_zeta(components.norms)
    v = zeta - expectation(f) ** 2
    v[0] = 0.0
    return CooperativeGame(f.n, np.maximum(v, 0.0))


def build_iclue_game(f: FunctionTable) -> CooperativeGame:
    """v(S) = I(Z : X_S) with Z the grouped value of f."""
    f.space.check_exact_guard()
    v = np.array([mutual_information(f, mask) for mask in range(1 << f.n)])
    v[0] = 0.0
    return CooperativeGame(f.n, v)


def shapley(game: CooperativeGame) -> ShapleyVector:
    """Exact average-marginal-contribution allocation, O(n 2^n)."""
    n = game.n
    v = game.v
    pc = popcounts(n)
    inv_choose = np.array([1.0 / comb(n - 1, s) for s in range(n)])
    masks = np.arange(1 << n)
    phi = np.empty(n)
    for i in range(n):
        without = masks[(masks >> i) & 1 == 0]
        gains = v[without | (1 << i)] - v[without]
        phi[i] = float(np.sum(gains * inv_choose[pc[without]])) / n
    return ShapleyVector(phi)


def is_supermodular(
    game: CooperativeGame, tol: float = 1e-10
) -> tuple[bool, tuple[int, int] | None]:
    """Exhaustive pair check of v(S)+v(T) <= v(S|T)+v(S&T); returns the first
    violating pair as a witness."""
    if game.n > SUPERMODULAR_GATE:
        raise GuardError("supermodularity check gated at n <= 10")
    v = game.v
    masks = np.arange(1 << game.n)
    for s in range(1 << game.n):
        gap = v[s | masks] + v[s & masks] - v[s] - v[masks]
        bad = np.nonzero(gap < -tol)[0]
        if bad.size:
            return False, (s, int(bad[0]))
    return True, None


def shapley_in_core(game: CooperativeGame, tol: float = 1e-10) -> bool:
    """Every coalition receives at least its characteristic value under the
    Shapley allocation (efficiency holds by construction)."""
    phi = shapley(game).phi
    coalition_payoff = np.zeros(1 << game.n)
    for i in range(game.n):
        masks = np.arange(1 << game.n)
        coalition_payoff[(masks >> i) & 1 == 1] += phi[i]
    return bool(np.all(coalition_payoff >= game.v - tol))


def restrict_game(game: CooperativeGame, mask: int) -> CooperativeGame:
    """Subgame on the players in ``mask`` (domain restricted to its subsets,
    players re-indexed in increasing coordinate order)."""
    players = mask_indices(mask)
    k = len(players)
    sub_v = np.empty(1 << k)
    for s in range(1 << k):
        full = 0
        for bit, player in enumerate(players):
            if (s >> bit) & 1:
                full |= 1 << player
        sub_v[s] = game.v[full]
    return CooperativeGame(k, sub_v)


def subgame_shapley_monotone(
    game: CooperativeGame, small: int, large: int, tol: float = 1e-10
) -> bool:
    """For supermodular games, growing the player pool can only raise each
    remaining player's Shapley value.  Refuses non-supermodular input."""
    if small & ~large:
        raise ValueError("first mask must be a subset of the second")
    ok, witness_pair = is_supermodular(game)
    if not ok:
        raise ValueError(f"game is not supermodular (witness pair {witness_pair})")
    phi_small = shapley(restrict_game(game, small)).phi
    phi_large = shapley(restrict_game(game, large)).phi
    small_players = mask_indices(small)
    large_players = mask_indices(large)
    pos_in_large = {p: i for i, p in enumerate(large_players)}
    return all(
        phi_small[i] <= phi_large[pos_in_large[p]] + tol
        for i, p in enumerate(small_players)
    )


@dataclass(frozen=True)
class TransitiveBoundReport:
    invariant: bool
    transitive: bool
    shapley_in_core: bool
    bound_holds: bool
    max_violation: float


def game_is_invariant(game: CooperativeGame, perms) -> bool:
    for perm in perms:
        for mask in range(1 << game.n):
            img = 0
            for v in mask_indices(mask):
                img |= 1 << perm[v]
            if abs(game.v[img] - game.v[mask]) > 1e-12:
                return False
    return True


def transitive_game_bound(
    game: CooperativeGame, action, tol: float = 1e-10
) -> TransitiveBoundReport:
    """Check v(S) <= (|S|/n) v(V) for a game invariant under a transitive
    action whose Shapley vector sits in the core."""
    from .symmetry import is_transitive

    invariant = game_is_invariant(game, action.generators)
    transitive = is_transitive(action)
    in_core = shapley_in_core(game, tol)
    if not (invariant and transitive and in_core):
        raise ValueError("hypotheses not met: need an invariant transitive game with Shapley in core")
    pc = popcounts(game.n)
    bound = pc / game.n * game.grand_value
    gaps = game.v - bound
    return TransitiveBoundReport(
        invariant=invariant,
        transitive=transitive,
        shapley_in_core=in_core,
        bound_holds=bool(np.all(gaps <= tol)),
        max_violation=float(gaps.max()),
    )


def power_clue_game(f: FunctionTable, k: int) -> CooperativeGame:
    """Exploratory: v(S) = clue(f|S)^k.  Exposed so users can probe for which
    k supermodularity survives; nothing in the test suite asserts it."""
    base = build_clue_game(f)
    grand = base.grand_value
    if grand <= 0.0:
        raise ValueError("degenerate function")
    return CooperativeGame(f.n, (base.v / grand) ** k)
