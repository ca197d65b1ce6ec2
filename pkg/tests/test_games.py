import numpy as np
import pytest

from cluekit.core import FunctionTable, ProductSpace, uniform_space, variance
from cluekit.games import (
    CooperativeGame,
    build_clue_game,
    build_iclue_game,
    game_is_invariant,
    is_supermodular,
    power_clue_game,
    restrict_game,
    shapley,
    shapley_in_core,
    subgame_shapley_monotone,
    transitive_game_bound,
)
from cluekit.spectral import spectral_distribution, spectral_marginals
from cluekit.transforms import popcounts
from cluekit.zoo import dictator, majority, parity, sum_function, tribes


def sqrt_game(n=3):
    return CooperativeGame(n, np.sqrt(popcounts(n).astype(float)))


def test_game_requires_zero_at_empty():
    with pytest.raises(ValueError):
        CooperativeGame(2, np.array([0.1, 0.2, 0.3, 0.4]))


def test_build_clue_game_examples():
    g = build_clue_game(sum_function(4).table)
    np.testing.assert_allclose(g.v, popcounts(4).astype(float), atol=1e-10)
    d = build_clue_game(dictator(3, 0).table)
    np.testing.assert_allclose(d.v, [(m & 1) * 1.0 for m in range(8)], atol=1e-12)
    maj = build_clue_game(majority(3).table)
    assert maj.v[0b001] == pytest.approx(0.25, abs=1e-12)
    assert maj.v[0b011] == pytest.approx(0.5, abs=1e-12)
    assert maj.v[0b111] == pytest.approx(1.0, abs=1e-12)


def test_shapley_examples():
    np.testing.assert_allclose(shapley(build_clue_game(sum_function(4).table)).phi, 1.0, atol=1e-10)
    np.testing.assert_allclose(
        shapley(build_clue_game(dictator(3, 0).table)).phi, [1.0, 0.0, 0.0], atol=1e-12
    )
    np.testing.assert_allclose(
        shapley(build_clue_game(majority(3).table)).phi, 1 / 3, atol=1e-12
    )


def test_shapley_efficiency():
    rng = np.random.default_rng(0)
    for _ in range(10):
        game = CooperativeGame(5, np.concatenate([[0.0], rng.standard_normal(31)]))
        vec = shapley(game)
        assert vec.total == pytest.approx(game.grand_value, abs=1e-10)


def test_shapley_matches_spectral_marginal():
    rng = np.random.default_rng(1)
    f = FunctionTable(uniform_space(6), rng.standard_normal(64))
    phi = shapley(build_clue_game(f)).phi
    marg = spectral_marginals(spectral_distribution(f, conditioned=True))
    np.testing.assert_allclose(phi / variance(f), marg, atol=1e-9)


def test_supermodularity_examples():
    assert is_supermodular(build_clue_game(majority(3).table))[0]
    additive = CooperativeGame(4, popcounts(4).astype(float))
    assert is_supermodular(additive)[0]
    ok, witness_pair = is_supermodular(sqrt_game())
    assert not ok
    s, t = witness_pair
    v = sqrt_game().v
    assert v[s] + v[t] > v[s | t] + v[s & t] + 1e-10


def test_clue_games_supermodular_on_random_measures():
    rng = np.random.default_rng(2)
    for _ in range(8):
        q = int(rng.choice([2, 3]))
        sp = ProductSpace(5, q, rng.dirichlet(np.ones(q), size=5))
        f = FunctionTable(sp, rng.standard_normal(sp.size))
        assert is_supermodular(build_clue_game(f))[0]
        fb = FunctionTable(sp, (rng.random(sp.size) < 0.5).astype(float))
        assert is_supermodular(build_iclue_game(fb))[0]


def test_shapley_in_core_examples():
    assert shapley_in_core(build_clue_game(sum_function(4).table))
    assert shapley_in_core(build_clue_game(majority(3).table))
    assert not shapley_in_core(sqrt_game())


def test_shapley_in_core_random_supermodular_games():
    rng = np.random.default_rng(7)
    for _ in range(20):
        n = int(rng.integers(3, 7))
        f = FunctionTable(uniform_space(n), rng.standard_normal(1 << n))
        game = build_clue_game(f)
        assert is_supermodular(game)[0]
        assert shapley_in_core(game)


def test_subgame_shapley_monotone_examples():
    additive = CooperativeGame(4, popcounts(4).astype(float))
    assert subgame_shapley_monotone(additive, 0b0011, 0b1111)
    maj_game = build_clue_game(majority(3).table)
    assert subgame_shapley_monotone(maj_game, 0b011, 0b111)
    sub = restrict_game(maj_game, 0b011)
    np.testing.assert_allclose(shapley(sub).phi, [0.25, 0.25], atol=1e-12)
    with pytest.raises(ValueError):
        subgame_shapley_monotone(sqrt_game(), 0b001, 0b111)
    with pytest.raises(ValueError):
        subgame_shapley_monotone(additive, 0b1000, 0b0111)


def test_subgame_monotonicity_random_supermodular():
    rng = np.random.default_rng(3)
    for _ in range(25):
        n = int(rng.integers(3, 6))
        f = FunctionTable(uniform_space(n), rng.standard_normal(1 << n))
        game = build_clue_game(f)
        small = int(rng.integers(1, 1 << n))
        large = small | int(rng.integers(0, 1 << n))
        assert subgame_shapley_monotone(game, small, large)


def test_transitive_game_bound_examples():
    s = sum_function(6)
    report = transitive_game_bound(build_clue_game(s.table), s.action)
    assert report.bound_holds
    assert report.max_violation == pytest.approx(0.0, abs=1e-10)  # tight

    p = parity(5)
    game = build_clue_game(p.table)
    assert np.max(game.v[:-1]) == pytest.approx(0.0, abs=1e-12)
    assert transitive_game_bound(game, p.action).bound_holds

    m = majority(3)
    assert transitive_game_bound(build_clue_game(m.table), m.action).bound_holds

    t = tribes(2, 3)
    assert transitive_game_bound(build_clue_game(t.table), t.action).bound_holds


def test_transitive_game_bound_rejects_bad_hypotheses():
    d = dictator(3, 0)
    game = build_clue_game(d.table)
    from cluekit.symmetry import cyclic_group

    with pytest.raises(ValueError):
        transitive_game_bound(game, cyclic_group(3))


def test_game_invariance_check():
    m = majority(3)
    assert game_is_invariant(build_clue_game(m.table), m.action.generators)


def test_power_game_exposed_but_unasserted():
    game = power_clue_game(majority(3).table, 2)
    assert game.grand_value == pytest.approx(1.0)
    ok, _ = is_supermodular(game)
    assert ok in (True, False)
