from fractions import Fraction

import numpy as np
import pytest

from cluekit.clue import clue
from cluekit.core import expectation
from cluekit.errors import GuardError
from cluekit.perco import (
    RectangleSpec,
    TorusSpec,
    averaged_crossing_clue_bound,
    averaged_lr_table,
    crossing_batch,
    crossing_probability_exact,
    crossing_probability_mc,
    dual_crossing,
    dual_crossing_batch,
    lr_crossing,
    torus_lr_table,
    torus_lr_values,
    translate_disagreement,
    _all_configs,
)
from cluekit.symmetry import is_invariant


def test_rectangle_edge_count():
    rect = RectangleSpec(3, 2)
    assert rect.edge_count == (3 - 1) * 2 + 3 * (2 - 1) == 7
    assert rect.self_dual
    assert not RectangleSpec(3, 3).self_dual


def test_all_open_crosses_all_closed_does_not():
    rect = RectangleSpec(4, 3)
    assert lr_crossing((1 << rect.edge_count) - 1, rect)
    assert not lr_crossing(0, rect)


def test_single_open_row_crosses():
    rect = RectangleSpec(4, 3)
    config = 0
    for x in range(3):
        config |= 1 << rect.horizontal_edge(x, 1)
    assert lr_crossing(config, rect)


def test_dual_examples():
    rect = RectangleSpec(3, 2)
    assert not dual_crossing((1 << 7) - 1, rect)
    assert dual_crossing(0, rect)


def test_duality_xor_exhaustive():
    rect = RectangleSpec(3, 2)
    configs = _all_configs(rect.edge_count)
    xor = crossing_batch(rect, configs) ^ dual_crossing_batch(rect, configs)
    assert bool(np.all(xor))


def test_crossing_probability_examples():
    assert crossing_probability_exact(RectangleSpec(2, 1)) == Fraction(1, 2)
    assert crossing_probability_exact(RectangleSpec(2, 2)) == Fraction(3, 4)
    assert crossing_probability_exact(RectangleSpec(3, 2)) == Fraction(1, 2)


def test_crossing_probability_guard():
    with pytest.raises(GuardError):
        crossing_probability_exact(RectangleSpec(6, 5))


def test_crossing_probability_mc_agrees():
    rect = RectangleSpec(4, 3)
    exact = float(crossing_probability_exact(rect))
    estimate, stderr = crossing_probability_mc(rect, 40_000, seed=1)
    assert abs(estimate - exact) <= 3 * stderr


def test_torus_table_ignores_wrap_verticals():
    torus = TorusSpec(3)
    table = torus_lr_table(torus)
    idx = np.arange(table.values.size)
    for x in range(3):
        edge = torus.v_edge(x, 2)
        np.testing.assert_array_equal(table.values, table.values[idx ^ (1 << edge)])


def test_torus_marginal_matches_rectangle():
    torus = TorusSpec(3)
    table = torus_lr_table(torus)
    p_cross = (expectation(table) + 1.0) / 2.0
    assert p_cross == pytest.approx(float(crossing_probability_exact(torus.rectangle())), abs=1e-12)


def test_torus_all_open_crosses():
    torus = TorusSpec(3)
    open_matrix = np.ones((1, torus.edge_count), dtype=bool)
    assert torus_lr_values(torus, open_matrix)[0] == 1.0


def test_torus_guard():
    with pytest.raises(GuardError):
        torus_lr_table(TorusSpec(4))


def test_averaged_table_translation_invariant():
    torus = TorusSpec(3)
    averaged = averaged_lr_table(torus)
    assert is_invariant(averaged, torus.translation_group())


def test_averaged_clue_bound_examples():
    torus = TorusSpec(3)
    empty = averaged_crossing_clue_bound(torus, 0)
    assert empty.clue == 0.0 and empty.bound == 0.0 and empty.holds

    single = averaged_crossing_clue_bound(torus, 1 << torus.h_edge(1, 1))
    assert single.bound == pytest.approx(2 / 9)
    assert single.holds

    from cluekit.symmetry import subset_orbit_union

    orbit = subset_orbit_union(1 << torus.h_edge(0, 0), torus.translation_group(), 18)
    report = averaged_crossing_clue_bound(torus, orbit)
    assert report.bound == pytest.approx(2.0)  # vacuous but reported
    assert report.clue <= 1.0
    assert report.holds


def test_averaged_clue_matches_direct_computation():
    torus = TorusSpec(3)
    averaged = averaged_lr_table(torus)
    mask = (1 << torus.h_edge(0, 0)) | (1 << torus.v_edge(1, 0))
    report = averaged_crossing_clue_bound(torus, mask)
    assert report.clue == pytest.approx(clue(averaged, mask), abs=1e-12)


def test_translate_disagreement_zero_displacements():
    est0 = translate_disagreement(3, (0, 0), 2000, seed=4)
    assert est0.estimate == 0.0
    full = translate_disagreement(3, (3, 0), 2000, seed=4)
    assert full.estimate == 0.0


def test_translate_disagreement_reports_interval():
    est = translate_disagreement(3, (1, 0), 5000, seed=4)
    assert 0.0 <= est.ci_low <= est.estimate <= est.ci_high <= 1.0
    assert est.estimate > 0.0
