import math
from fractions import Fraction

import numpy as np
import pytest

from pairfunc.functionals import (
    AdmissibilityRule,
    FunctionalValue,
    compound_score,
    diff_first,
    diff_second,
    double_sum,
    empirical_stabilization_radius,
    sum_log_sum,
)
from pairfunc.geometry import Window
from pairfunc.graphs import FixedRadius, build_edges, crossing_number
from pairfunc.models import get_model
from pairfunc.process import MarkModel, MarkedPoint, PointConfiguration, insert_point

from conftest import (
    inversion_count_quadratic,
    make_configuration,
    random_configuration,
    stabilization_radius_oracle,
)


W2 = Window(n=10.0, dim=2)
INV = get_model("inversion-uniform")
TREE = get_model("inversion-tree")
TREELOG = get_model("treelog-uniform")
CROSS = get_model("crossing-fixed")


def _uniform_cfg(rng, window, count):
    from conftest import random_configuration

    return random_configuration(rng, window, count, MarkModel.uniform01())


def test_double_sum_empty():
    empty = PointConfiguration(W2, MarkModel.uniform01(), ())
    assert double_sum(empty, INV.score) == 0.0


def test_double_sum_is_twice_unordered_inversions():
    rng = np.random.default_rng(3)
    for _ in range(10):
        cfg = _uniform_cfg(rng, W2, int(rng.integers(2, 60)))
        ctx = INV.score.build_context(cfg)
        total = double_sum(cfg, INV.score)
        assert total == inversion_count_quadratic(ctx.barcode)
        assert total % 2 == 0


def test_double_sum_crossing_equals_direct_count():
    rng = np.random.default_rng(5)
    w3 = Window(n=4.0, dim=3)
    for _ in range(5):
        cfg = random_configuration(rng, w3, 40)
        total = double_sum(cfg, CROSS.score)
        g = build_edges(cfg, FixedRadius())
        assert total == crossing_number(g)
        # the 1/8-weighted ordered sum collapses to the same integer
        ordered = sum(
            CROSS.score.pair_value(a.id, b.id, CROSS.score.build_context(cfg))
            for a in cfg.points
            for b in cfg.points
            if a.id != b.id
        )
        assert ordered == pytest.approx(total)


def test_compound_score_examples():
    cfg = make_configuration(
        W2, [(1.0, 1.0), (1.2, 5.0), (8.0, 8.0)], marks=[0.9, 0.5, 0.4],
        mark_model=MarkModel.uniform01(),
    )
    # bars (1.0, 0.9) and (1.2, 0.5) invert; the third is far away in time
    assert compound_score(cfg, 0, INV.score) == 1
    assert compound_score(cfg, 2, INV.score) == 0
    with pytest.raises(KeyError):
        compound_score(cfg, 42, INV.score)


def test_sum_of_compound_scores_is_double_sum():
    rng = np.random.default_rng(7)
    cfg = _uniform_cfg(rng, W2, 50)
    ctx = INV.score.build_context(cfg)
    total = sum(compound_score(cfg, p.id, INV.score, ctx) for p in cfg.points)
    assert total == double_sum(cfg, INV.score)


def test_sum_log_sum_empty_and_log1():
    empty = PointConfiguration(W2, MarkModel.uniform01(), ())
    fv = sum_log_sum(empty, TREELOG.score, TREELOG.admissibility)
    assert fv.value == 0.0 and fv.product() == 1.0
    assert fv.admissible_count == 0 and fv.dropped_zero_g == 0
    # one admissible point with exactly one partner: log G = log 1 = 0
    w = Window(n=16.0, dim=2, boundary_margin=0.2)
    cfg = make_configuration(
        w, [(8.0, 8.0), (8.2, 9.0)], marks=[0.9, 0.5], mark_model=MarkModel.uniform01()
    )
    fv = sum_log_sum(cfg, TREELOG.score, TREELOG.admissibility)
    assert fv.value == 0.0
    assert fv.admissible_count == 2 and fv.dropped_zero_g == 0


def test_sum_log_sum_matches_big_integer_product():
    rng = np.random.default_rng(11)
    w = Window(n=12.0, dim=2, boundary_margin=0.2)
    for _ in range(20):
        cfg = _uniform_cfg(rng, w, int(rng.integers(2, 40)))
        fv = sum_log_sum(cfg, TREELOG.score, TREELOG.admissibility)
        ctx = TREELOG.score.build_context(cfg)
        mask = TREELOG.admissibility.mask(cfg, ctx)
        G = TREELOG.score.compound_all(ctx)
        product = 1
        for p in cfg.points:
            if mask[p.id] and G[p.id] > 0:
                product *= int(G[p.id])
        if product == 1:
            assert fv.value == 0.0
        else:
            log_exact = Fraction(product).numerator  # exact big integer
            assert math.exp(fv.value) == pytest.approx(product, rel=1e-10)
            assert fv.value == pytest.approx(math.log(log_exact), rel=1e-12)


def test_sum_log_sum_counts_dropped_points():
    w = Window(n=16.0, dim=2, boundary_margin=0.2)
    # two admissible bars that do not invert: both have G = 0 and are dropped
    cfg = make_configuration(
        w, [(8.0, 8.0), (10.0, 9.0)], marks=[0.3, 0.3], mark_model=MarkModel.uniform01()
    )
    fv = sum_log_sum(cfg, TREELOG.score, TREELOG.admissibility)
    assert fv.value == 0.0
    assert fv.admissible_count == 2
    assert fv.dropped_zero_g == 2


def test_sum_log_sum_rejects_non_integer_scores():
    cfg = PointConfiguration(W2, MarkModel.none(), ())
    with pytest.raises(ValueError):
        sum_log_sum(cfg, CROSS.score, AdmissibilityRule.all())


def test_product_reporting_in_log_space():
    fv = FunctionalValue("sum_log_sum", 2500.0, 10, 0)
    assert fv.product() == math.inf  # overflow is fine; reporting uses log10
    log10 = fv.product_log10()
    mant, expo = fv.product_mantissa_exponent()
    assert log10 == pytest.approx(2500.0 / math.log(10.0))
    assert 1.0 <= mant < 10.0
    assert expo == math.floor(log10)


# -- difference operators ------------------------------------------------------

def test_diff_first_far_away_crossing_is_zero():
    rng = np.random.default_rng(13)
    w3 = Window(n=8.0, dim=3)
    cfg = make_configuration(
        w3, [(1.0, 1.0, 1.0), (1.5, 1.2, 1.0), (1.2, 1.7, 1.3), (1.9, 1.9, 1.1)]
    )
    f = CROSS.functional()
    # far outside every slab of existing points in the first two coordinates
    assert diff_first(cfg, (7.0, 7.0, 1.0), f) == 0.0


def test_diff_first_empty_configuration():
    empty = PointConfiguration(W2, MarkModel.uniform01(), ())
    f = INV.functional()
    assert diff_first(empty, MarkedPoint((3.0, 3.0), 0.5, 0), f) == 0.0


def test_diff_first_matches_recompute_oracle():
    rng = np.random.default_rng(17)
    f = INV.functional()
    for _ in range(10):
        cfg = _uniform_cfg(rng, W2, int(rng.integers(2, 40)))
        x = MarkedPoint(tuple(rng.uniform(0, 10, 2)), float(rng.uniform(0, 1)), 0)
        direct = f(insert_point(cfg, x)) - f(cfg)
        assert diff_first(cfg, x, f) == direct


def test_diff_second_disjoint_slabs_vanishes():
    w3 = Window(n=12.0, dim=3)
    cfg = make_configuration(
        w3, [(1.0, 1.0, 1.0), (1.5, 1.2, 1.0), (10.0, 10.0, 1.0), (10.5, 10.2, 1.0)]
    )
    f = CROSS.functional()
    # x and y far apart in the first two (local) coordinates
    assert diff_second(cfg, (1.2, 1.5, 1.2), (10.2, 10.5, 1.2), f) == 0.0


def test_diff_second_duplicate_insert_matches_four_evaluations():
    rng = np.random.default_rng(19)
    f = INV.functional()
    cfg = _uniform_cfg(rng, W2, 20)
    x = MarkedPoint((5.0, 5.0), 0.5, 0)
    cfg_x = insert_point(cfg, x)
    cfg_xx = insert_point(cfg_x, x)
    expected = f(cfg_xx) - 2.0 * f(cfg_x) + f(cfg)
    assert diff_second(cfg, x, x, f) == expected


def test_diff_second_two_nested_bars_from_empty():
    empty = PointConfiguration(W2, MarkModel.uniform01(), ())
    f = INV.functional()
    x = MarkedPoint((3.0, 3.0), 0.9, 0)
    y = MarkedPoint((3.1, 7.0), 0.5, 0)
    assert diff_second(empty, x, y, f) == 2.0


# -- stabilization radii ---------------------------------------------------------

def test_fixed_radius_crossing_stabilizes_at_one():
    rng = np.random.default_rng(23)
    w3 = Window(n=4.0, dim=3)
    for _ in range(10):
        cfg = random_configuration(rng, w3, int(rng.integers(2, 40)))
        x = tuple(rng.uniform(0, 4, 3))
        assert empirical_stabilization_radius(cfg, x, CROSS.score) == 1


def test_isolated_insertion_in_empty_tree_model():
    w = Window(n=24.0, dim=2)
    empty = PointConfiguration(w, MarkModel.none(), ())
    assert empirical_stabilization_radius(empty, (12.0, 12.0), TREE.score) == 1


def test_crossing_stabilization_matches_incremental_oracle():
    rng = np.random.default_rng(41)
    w3 = Window(n=4.0, dim=3)
    for _ in range(8):
        cfg = random_configuration(rng, w3, int(rng.integers(2, 20)))
        x = tuple(rng.uniform(0, 4, 3))
        got = empirical_stabilization_radius(cfg, x, CROSS.score)
        assert got == stabilization_radius_oracle(cfg, x, CROSS.score)


def test_stabilization_radius_matches_incremental_oracle():
    rng = np.random.default_rng(29)
    w = Window(n=12.0, dim=2)
    for _ in range(25):
        cfg = random_configuration(rng, w, int(rng.integers(2, 40)))
        x = tuple(rng.uniform(0, 12, 2))
        got = empirical_stabilization_radius(cfg, x, TREE.score)
        assert got == stabilization_radius_oracle(cfg, x, TREE.score)


def test_stabilization_radius_with_admissibility_matches_oracle():
    rng = np.random.default_rng(31)
    w = Window(n=12.0, dim=2, boundary_margin=0.2)
    treelog_tree = get_model("treelog-tree")
    for _ in range(10):
        cfg = random_configuration(rng, w, int(rng.integers(2, 30)))
        x = tuple(rng.uniform(0, 12, 2))
        got = empirical_stabilization_radius(
            cfg, x, treelog_tree.score, treelog_tree.admissibility
        )
        oracle = stabilization_radius_oracle(
            cfg, x, treelog_tree.score, treelog_tree.admissibility
        )
        assert got == oracle
