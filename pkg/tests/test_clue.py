import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cluekit.clue import (
    clue,
    clue_all_subsets_table,
    clue_report,
    clue_spectral,
    expected_clue,
    influence_coordinate,
    influence_set,
    p_min,
    projection_distortion_check,
    sig,
    sig_spectral,
    tv_clue,
    witness,
)
from cluekit.core import (
    FunctionTable,
    bernoulli_sets,
    complement_mask,
    revealment,
    singleton_sets,
    translate_sets,
    uniform_space,
)
from cluekit.errors import DegenerateError
from cluekit.spectral import spectral_distribution, stability, stability_profile
from cluekit.symmetry import cyclic_group
from cluekit.transforms import popcounts
from cluekit.zoo import dictator, majority, parity, sum_function, tribes


def test_clue_sum_is_exactly_proportional():
    f = sum_function(6).table
    for mask in range(64):
        assert clue(f, mask) == pytest.approx(mask.bit_count() / 6, abs=1e-12)


def test_clue_parity_proper_subsets_zero():
    f = parity(4).table
    for mask in range(15):
        assert clue(f, mask) == pytest.approx(0.0, abs=1e-12)


def test_clue_maj3():
    f = majority(3).table
    assert clue(f, 0b001) == pytest.approx(0.25, abs=1e-12)
    assert clue(f, 0b011) == pytest.approx(0.5, abs=1e-12)
    assert clue(f, 0b111) == pytest.approx(1.0, abs=1e-12)


def test_clue_degenerate_function_raises():
    f = FunctionTable(uniform_space(3), np.full(8, 1.5))
    with pytest.raises(DegenerateError):
        clue(f, 0b1)


def test_clue_spectral_matches_direct():
    rng = np.random.default_rng(0)
    f = FunctionTable(uniform_space(6), rng.standard_normal(64))
    dist = spectral_distribution(f, conditioned=True)
    for mask in range(64):
        assert clue_spectral(dist, mask) == pytest.approx(clue(f, mask), abs=1e-10)
    bulk = clue_all_subsets_table(f)
    for mask in range(64):
        assert bulk[mask] == pytest.approx(clue(f, mask), abs=1e-10)


def test_sig_examples():
    f = parity(4).table
    for mask in (0b1, 0b1010, 0b1111):
        assert sig(f, mask) == pytest.approx(1.0, abs=1e-12)
    d = dictator(3, 0).table
    assert sig(d, 0b110) == pytest.approx(0.0, abs=1e-12)
    assert sig(majority(3).table, 0b001) == pytest.approx(0.5, abs=1e-12)


def test_sig_duality_and_spectral_form():
    rng = np.random.default_rng(1)
    f = FunctionTable(uniform_space(6), rng.standard_normal(64))
    dist = spectral_distribution(f, conditioned=True)
    for mask in rng.integers(0, 64, size=20):
        mask = int(mask)
        assert sig(f, mask) == 1.0 - clue(f, complement_mask(mask, 6))
        assert sig_spectral(dist, mask) == pytest.approx(sig(f, mask), abs=1e-10)


def test_influence_set_examples():
    assert influence_set(parity(4).table, 0b0010) == pytest.approx(1.0)
    assert influence_set(dictator(3, 0).table, 0b001) == pytest.approx(1.0)
    assert influence_set(majority(3).table, 0b001) == pytest.approx(0.5)


def test_witness_examples():
    assert witness(dictator(3, 0).table, 0b001) == pytest.approx(1.0)
    assert witness(parity(4).table, 0b0111) == pytest.approx(0.0)
    assert witness(majority(3).table, 0b011) == pytest.approx(0.5)


def test_witness_influence_need_boolean():
    f = FunctionTable(uniform_space(2), np.array([0.0, 0.5, 1.0, 2.0]))
    with pytest.raises(ValueError):
        witness(f, 0b01)
    with pytest.raises(ValueError):
        influence_set(f, 0b01)


def test_influence_coordinate_examples():
    assert influence_coordinate(dictator(4, 2).table, 2) == pytest.approx(1.0)
    assert influence_coordinate(parity(4).table, 1) == pytest.approx(1.0)
    for j in range(3):
        assert influence_coordinate(majority(3).table, j) == pytest.approx(0.5)


def test_tv_clue_examples():
    f = majority(3).table.as_indicator()
    assert tv_clue(f, 0) == pytest.approx(0.0, abs=1e-14)
    assert tv_clue(f, 0b111) == pytest.approx(1.0, abs=1e-14)
    assert tv_clue(f, 0b001) == pytest.approx(0.5, abs=1e-14)


def test_expected_clue_examples():
    f = majority(3).table
    singles = singleton_sets(3)
    ec = expected_clue(f, singles)
    assert ec == pytest.approx(0.25, abs=1e-12)
    assert revealment(singles) == pytest.approx(1 / 3)
    assert ec <= revealment(singles)

    bern = bernoulli_sets(3, 0.5)
    assert expected_clue(f, bern) == pytest.approx(13 / 32, abs=1e-10)
    assert expected_clue(f, bern) == pytest.approx(
        stability(stability_profile(f), 0.5), abs=1e-10
    )

    d = dictator(4, 0).table
    assert expected_clue(d, singleton_sets(4)) == pytest.approx(revealment(singleton_sets(4)))


def test_expected_clue_translate_bound():
    rng = np.random.default_rng(2)
    n = 7
    f = FunctionTable(uniform_space(n), rng.standard_normal(1 << n))
    cyc = cyclic_group(n).elements()
    for _ in range(10):
        mask = int(rng.integers(1, 1 << n))
        dist = translate_sets(mask, cyc, n)
        assert expected_clue(f, dist) <= revealment(dist) + 1e-10


def test_order_chain_on_balanced_functions():
    # witness <= clue and sig <= influence need balanced tables; unbalanced
    # Boolean functions break both (rare fibers can carry most variance).
    rng = np.random.default_rng(3)
    n = 6
    sp = uniform_space(n)
    for _ in range(15):
        vals = np.zeros(1 << n)
        vals[rng.permutation(1 << n)[: 1 << (n - 1)]] = 1.0
        f = FunctionTable(sp, vals)
        for mask in range(0, 1 << n, 3):
            c = clue(f, mask)
            assert witness(f, mask) <= c + 1e-12
            s = sig(f, mask)
            assert c <= s + 1e-12
            assert s <= influence_set(f, mask) + 1e-12


def test_transitive_bound_zoo():
    for entry in (sum_function(8), parity(8), majority(7), tribes(2, 4)):
        f = entry.table
        bulk = clue_all_subsets_table(f)
        assert np.max(bulk - popcounts(f.n) / f.n) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    a=st.floats(min_value=0.1, max_value=10.0, allow_nan=False),
    b=st.floats(min_value=-5.0, max_value=5.0, allow_nan=False),
)
def test_clue_affine_invariance(seed, a, b):
    rng = np.random.default_rng(seed)
    f = FunctionTable(uniform_space(4), rng.standard_normal(16))
    g = FunctionTable(f.space, a * f.values + b)
    mask = int(rng.integers(0, 16))
    assert clue(g, mask) == pytest.approx(clue(f, mask), abs=1e-12)


def test_p_min():
    assert p_min(majority(3).table) == pytest.approx(0.5)
    assert p_min(tribes(2, 2).table) == pytest.approx(7 / 16)


def test_clue_equals_squared_correlation_with_projection():
    from cluekit.core import conditional_expectation, correlation

    rng = np.random.default_rng(6)
    f = FunctionTable(uniform_space(5), rng.standard_normal(32))
    for mask in (0b1, 0b1010, 0b11011):
        proj = conditional_expectation(f, mask)
        assert clue(f, mask) == pytest.approx(correlation(f, proj) ** 2, abs=1e-12)


def test_projection_distortion_identical_functions():
    f = majority(3).table
    report = projection_distortion_check(f, f, 0b011)
    assert report.eps == pytest.approx(0.0, abs=1e-12)
    assert report.min_clue_bound_ok and report.transfer_bound_ok


def test_projection_distortion_affine_pair():
    f = majority(3).table
    g = FunctionTable(f.space, 2.0 * f.values + 3.0)
    report = projection_distortion_check(f, g, 0b001)
    assert report.eps == pytest.approx(0.0, abs=1e-12)
    assert report.clue_f == pytest.approx(report.clue_g, abs=1e-12)
    assert report.min_clue_bound_ok and report.transfer_bound_ok


def test_projection_distortion_random_pairs():
    rng = np.random.default_rng(4)
    for _ in range(60):
        n = int(rng.integers(2, 7))
        sp = uniform_space(n)
        f = FunctionTable(sp, rng.standard_normal(1 << n))
        g = FunctionTable(sp, f.values + rng.uniform(0, 2) * rng.standard_normal(1 << n))
        mask = int(rng.integers(0, 1 << n))
        report = projection_distortion_check(f, g, mask, tol=1e-9)
        assert report.min_clue_bound_ok and report.transfer_bound_ok


def test_clue_report_bundle():
    rep = clue_report(majority(3).table, 0b001)
    assert rep.l2_clue == pytest.approx(0.25)
    assert rep.sig == pytest.approx(0.5)
    assert rep.influence_set == pytest.approx(0.5)
    assert rep.witness == pytest.approx(0.0)
    assert rep.tv_clue == pytest.approx(0.5)
    assert rep.p_min == pytest.approx(0.5)
    assert not rep.degenerate_fibers
