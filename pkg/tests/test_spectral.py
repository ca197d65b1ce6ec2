import numpy as np
import pytest

from cluekit.core import (
    FunctionTable,
    ProductSpace,
    biased_bits,
    l2_norm_sq,
    uniform_space,
    variance,
)
from cluekit.errors import DegenerateError, GuardError
from cluekit.spectral import (
    covariance_lemma_check,
    efron_stein,
    inverse_walsh_hadamard,
    is_monotone,
    noise_pair_weights,
    pivotal_set,
    projected_variance_from_weights,
    sample_spectral,
    spectral_distribution,
    spectral_marginal,
    spectral_marginals,
    stability,
    stability_profile,
    walsh_hadamard,
)
from cluekit.montecarlo import generator_for
from cluekit.transforms import popcounts
from cluekit.zoo import dictator, majority, parity, sum_function


def test_walsh_dictator():
    coeffs = walsh_hadamard(dictator(3, 1).table).coeffs
    expected = np.zeros(8)
    expected[0b010] = 1.0
    np.testing.assert_allclose(coeffs, expected, atol=1e-14)


def test_walsh_parity():
    coeffs = walsh_hadamard(parity(4).table).coeffs
    expected = np.zeros(16)
    expected[0b1111] = 1.0
    np.testing.assert_allclose(coeffs, expected, atol=1e-14)


def test_walsh_maj3():
    coeffs = walsh_hadamard(majority(3).table).coeffs
    expected = np.zeros(8)
    expected[[0b001, 0b010, 0b100]] = 0.5
    expected[0b111] = -0.5
    np.testing.assert_allclose(coeffs, expected, atol=1e-14)


def test_walsh_inverse_round_trip():
    rng = np.random.default_rng(0)
    f = FunctionTable(uniform_space(7), rng.standard_normal(128))
    back = inverse_walsh_hadamard(walsh_hadamard(f))
    np.testing.assert_allclose(back.values, f.values, atol=1e-12)


def test_walsh_requires_uniform_binary():
    f = FunctionTable(biased_bits(3, 0.6), np.arange(8, dtype=float))
    with pytest.raises(GuardError):
        walsh_hadamard(f)


def test_parseval_and_projected_variance():
    from cluekit.core import expectation

    rng = np.random.default_rng(1)
    f = FunctionTable(uniform_space(8), rng.standard_normal(256))
    coeffs = walsh_hadamard(f).coeffs
    assert np.sum(coeffs**2) == pytest.approx(l2_norm_sq(f), abs=1e-10)
    assert coeffs[0] == pytest.approx(expectation(f), abs=1e-12)
    from cluekit.core import conditional_expectation

    for mask in rng.integers(0, 256, size=12):
        direct = variance(conditional_expectation(f, int(mask)))
        via = projected_variance_from_weights(f, int(mask))
        assert direct == pytest.approx(via, abs=1e-10)


def test_efron_stein_matches_walsh_on_uniform():
    rng = np.random.default_rng(2)
    f = FunctionTable(uniform_space(6), rng.standard_normal(64))
    np.testing.assert_allclose(
        efron_stein(f).norms, walsh_hadamard(f).coeffs ** 2, atol=1e-10
    )


def test_efron_stein_constant_function():
    f = FunctionTable(uniform_space(4), np.full(16, 2.5))
    norms = efron_stein(f).norms
    assert norms[0] == pytest.approx(2.5**2)
    np.testing.assert_allclose(norms[1:], 0.0, atol=1e-12)


def test_efron_stein_biased_bit():
    space = biased_bits(1, 0.75)
    f = FunctionTable(space, np.array([0.0, 1.0]))
    norms = efron_stein(f).norms
    assert norms[0] == pytest.approx(0.75**2, abs=1e-14)
    assert norms[1] == pytest.approx(3 / 16, abs=1e-14)


def test_efron_stein_nonnegative_on_random_measures():
    rng = np.random.default_rng(3)
    for _ in range(10):
        q = int(rng.choice([2, 3]))
        space = ProductSpace(6, q, rng.dirichlet(np.ones(q), size=6))
        f = FunctionTable(space, rng.standard_normal(space.size))
        comp = efron_stein(f)
        assert comp.norms.min() >= 0.0
        assert comp.norms.sum() == pytest.approx(l2_norm_sq(f), abs=1e-9)


def test_efron_stein_nonnegative_at_gate_boundary():
    rng = np.random.default_rng(13)
    space = ProductSpace(8, 3, rng.dirichlet(np.ones(3), size=8))
    f = FunctionTable(space, rng.standard_normal(space.size))
    comp = efron_stein(f)
    assert comp.norms.min() >= 0.0
    assert comp.norms.sum() == pytest.approx(l2_norm_sq(f), abs=1e-9)


def test_efron_stein_components_reconstruct_and_orthogonal():
    rng = np.random.default_rng(4)
    space = ProductSpace(4, 3, rng.dirichlet(np.ones(3), size=4))
    f = FunctionTable(space, rng.standard_normal(space.size))
    comp = efron_stein(f, materialize=True)
    np.testing.assert_allclose(comp.tables.sum(axis=0), f.values, atol=1e-10)
    w = space.config_weights()
    gram = (comp.tables * w) @ comp.tables.T
    np.fill_diagonal(gram, 0.0)
    assert np.max(np.abs(gram)) < 1e-9


def test_spectral_distribution_maj3():
    dist = spectral_distribution(majority(3).table, conditioned=True)
    np.testing.assert_allclose(
        dist.mass[[0b001, 0b010, 0b100, 0b111]], 0.25, atol=1e-12
    )


def test_spectral_distribution_parity_point_mass():
    dist = spectral_distribution(parity(4).table, conditioned=True)
    assert dist.mass[0b1111] == pytest.approx(1.0)


def test_spectral_distribution_sum_uniform_on_singletons():
    dist = spectral_distribution(sum_function(5).table, conditioned=True)
    for j in range(5):
        assert dist.mass[1 << j] == pytest.approx(1 / 5, abs=1e-12)


def test_spectral_distribution_degenerate():
    f = FunctionTable(uniform_space(3), np.ones(8))
    with pytest.raises(DegenerateError):
        spectral_distribution(f, conditioned=True)


def test_spectral_marginal_examples():
    maj = spectral_distribution(majority(3).table, conditioned=True)
    for j in range(3):
        assert spectral_marginal(maj, j) == pytest.approx(1 / 3, abs=1e-12)
    s = spectral_distribution(sum_function(6).table, conditioned=True)
    assert spectral_marginal(s, 2) == pytest.approx(1 / 6, abs=1e-12)
    d = spectral_distribution(dictator(4, 1).table, conditioned=True)
    assert spectral_marginal(d, 1) == pytest.approx(1.0)


def test_sample_spectral_point_masses():
    rng = generator_for(1, 0)
    d = spectral_distribution(dictator(3, 1).table, conditioned=True)
    assert all(sample_spectral(d, rng, size=20) == 0b010)
    p = spectral_distribution(parity(3).table, conditioned=True)
    assert all(sample_spectral(p, rng, size=20) == 0b111)


def test_sample_spectral_maj3_frequencies():
    dist = spectral_distribution(majority(3).table, conditioned=True)
    draws = sample_spectral(dist, generator_for(2, 0), size=100_000)
    sigma = np.sqrt(0.25 * 0.75 / 100_000)
    for mask in (0b001, 0b010, 0b100, 0b111):
        freq = np.mean(draws == mask)
        assert abs(freq - 0.25) <= 3 * sigma


def test_sample_spectral_deterministic_per_seed():
    dist = spectral_distribution(majority(3).table, conditioned=True)
    a = sample_spectral(dist, generator_for(9, 3), size=50)
    b = sample_spectral(dist, generator_for(9, 3), size=50)
    np.testing.assert_array_equal(a, b)


def test_spectral_marginal_matches_empirical_uniform_pick():
    f = FunctionTable(uniform_space(4), np.random.default_rng(7).standard_normal(16))
    dist = spectral_distribution(f, conditioned=True)
    marg = spectral_marginals(dist)
    rng = generator_for(3, 0)
    draws = sample_spectral(dist, rng, size=100_000)
    counts = np.zeros(4)
    pick = generator_for(4, 0)
    for mask in draws:
        coords = [v for v in range(4) if (mask >> v) & 1]
        counts[coords[pick.integers(len(coords))]] += 1
    freq = counts / len(draws)
    sigma = np.sqrt(np.maximum(marg * (1 - marg), 1e-9) / len(draws))
    assert np.all(np.abs(freq - marg) <= 3 * sigma)


def test_stability_examples():
    assert stability(stability_profile(dictator(4, 0).table), 0.3) == pytest.approx(0.3)
    assert stability(stability_profile(parity(5).table), 0.5) == pytest.approx(0.5**5)
    prof = stability_profile(majority(3).table)
    assert stability(prof, 0.5) == pytest.approx(13 / 32, abs=1e-12)
    with pytest.raises(ValueError):
        stability(prof, 1.5)


def test_level_weights_sum_to_variance():
    rng = np.random.default_rng(8)
    f = FunctionTable(uniform_space(6), rng.standard_normal(64))
    prof = stability_profile(f)
    assert prof.level_weights[1:].sum() == pytest.approx(variance(f), abs=1e-10)
    assert np.all(prof.level_weights >= 0)


def test_pivotal_examples():
    assert pivotal_set(dictator(3, 0).table, 0b101) == 0b001
    assert pivotal_set(parity(3).table, 0b010) == 0b111
    # spins (+,+,-) = digits (1,1,0) = index 0b011
    assert pivotal_set(majority(3).table, 0b011) == 0b011


def test_pivotal_rejects_non_boolean():
    f = FunctionTable(uniform_space(2), np.array([0.0, 1.0, 2.0, 3.0]))
    with pytest.raises(ValueError):
        pivotal_set(f, 0)


def test_covariance_identity_examples():
    d = dictator(3, 0).table
    assert covariance_lemma_check(d, d) == pytest.approx((1.0, 1.0), abs=1e-12)
    maj = majority(3).table
    lhs, rhs = covariance_lemma_check(maj, maj)
    assert lhs == pytest.approx(1.0, abs=1e-12)
    assert rhs == pytest.approx(1.0, abs=1e-12)
    lhs, rhs = covariance_lemma_check(maj, d)
    assert lhs == pytest.approx(0.5, abs=1e-12)
    assert rhs == pytest.approx(0.5, abs=1e-12)


def test_covariance_identity_refuses_non_monotone():
    with pytest.raises(ValueError):
        covariance_lemma_check(parity(3).table, parity(3).table)
    assert not is_monotone(parity(3).table)
    assert is_monotone(majority(3).table)


@pytest.mark.parametrize("p", [0.0, 0.25, 0.5, 0.75, 1.0])
def test_noise_pair_character_identity(p):
    n = 5
    idx = np.arange(1 << n)
    weights = noise_pair_weights(n, p)
    chi = np.ones((1 << n, 1 << n))
    for mask in range(1 << n):
        for v in range(n):
            if (mask >> v) & 1:
                chi[mask] *= np.where((idx >> v) & 1 == 1, 1.0, -1.0)
    cross = chi @ weights @ chi.T
    expected = np.diag([p ** int(k) for k in popcounts(n)])
    np.testing.assert_allclose(cross, expected, atol=1e-12)


def test_covariance_identity_gate():
    big = majority(9).table
    with pytest.raises(GuardError):
        covariance_lemma_check(big, big)
