from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from apgcone import (
    HypothesesNotMetError,
    PointNode,
    a_of_apg,
    a_of_pg,
    b_of_apg,
    b_prime_of_apg,
    ceil_star,
    closed_form_constellation,
    closed_form_free_points,
    compute_thresholds,
    derive_chains,
    f_star,
    generator_set,
    make_graph,
    plus_ceil,
    report,
    self_intersection,
    anticanonical_product,
    strict_pos_threshold,
)

from conftest import random_graph, single_point_graph

rationals = st.fractions(
    min_value=Fraction(-40), max_value=Fraction(40), max_denominator=12
)


def test_ceil_star_examples():
    assert ceil_star(Fraction(9, 10)) == 1
    assert ceil_star(2) == 2
    assert ceil_star(-5) == 1


def test_strict_pos_threshold_examples():
    assert strict_pos_threshold(0) == 1
    assert strict_pos_threshold(Fraction(11, 5)) == 3
    assert strict_pos_threshold(Fraction(-1, 2)) == 0


@given(rationals)
def test_ceil_star_is_least_positive_upper_bound(x):
    value = ceil_star(x)
    assert value >= 1 and value >= x
    assert not (value - 1 >= 1 and value - 1 >= x)


@given(rationals)
def test_strict_pos_is_least_nonnegative_strict_bound(x):
    value = strict_pos_threshold(x)
    assert value >= 0 and value > x
    assert not (value - 1 >= 0 and value - 1 > x)


@given(rationals)
def test_plus_ceil_off_by_one_exactly_at_nonnegative_integers(x):
    strict, literal = strict_pos_threshold(x), plus_ceil(x)
    if x >= 0 and x.denominator == 1:
        assert strict == literal + 1
    else:
        assert strict == literal


def test_fix_a_thresholds(fix_a):
    t = compute_thresholds(fix_a)
    assert (t.a, t.b_prime, t.b) == (2, 1, 2)


def test_fix_b_thresholds(fix_b):
    t = compute_thresholds(fix_b)
    assert (t.a, t.b_prime, t.b) == (1, 3, 3)


def test_fix_e_thresholds(fix_e):
    t = compute_thresholds(fix_e)
    assert (t.a, t.b_prime, t.b_prime_paper, t.b) == (8, 7, 6, 8)
    assert a_of_apg(fix_e) == 8
    assert b_prime_of_apg(fix_e) == 7
    assert b_prime_of_apg(fix_e, paper_rounding=True) == 6
    assert b_of_apg(fix_e) == 8


def test_closed_form_free_points_fix_e(fix_e):
    cf = closed_form_free_points(fix_e)
    assert (cf.a, cf.b_prime, cf.b_prime_paper) == (8, 7, 6)


def test_closed_form_free_points_simple_families():
    one = make_graph(
        [PointNode(id=f"p{i}", parent=None if i == 1 else f"p{i-1}",
                   proximate_to=() if i == 1 else (f"p{i-1}",))
         for i in range(1, 5)],
        {"p1": "f1"},
    )
    assert closed_form_free_points(one).a == 4
    two = make_graph(
        [
            PointNode(id="a1"),
            PointNode(id="a2", parent="a1", proximate_to=("a1",)),
            PointNode(id="b1"),
            PointNode(id="b2", parent="b1", proximate_to=("b1",)),
            PointNode(id="b3", parent="b2", proximate_to=("b2",)),
        ],
        {"a1": "f1", "b1": "f2"},
    )
    assert closed_form_free_points(two).a == 5


def test_closed_form_free_points_hypotheses(fix_a, fix_b):
    with pytest.raises(HypothesesNotMetError):
        closed_form_free_points(fix_a)  # satellites present
    with pytest.raises(HypothesesNotMetError):
        closed_form_free_points(fix_b)  # section flags present
    deep_fiber = make_graph(
        [
            PointNode(id="p1", on_fiber=True),
            PointNode(id="p2", parent="p1", proximate_to=("p1",), on_fiber=True),
        ],
        {"p1": "f1"},
    )
    with pytest.raises(HypothesesNotMetError):
        closed_form_free_points(deep_fiber)


def test_closed_form_constellation_fix_b(fix_b):
    cf = closed_form_constellation(fix_b)
    assert (cf.a, cf.b_prime) == (1, 3)
    t = compute_thresholds(fix_b)
    assert (cf.a, cf.b_prime) == (t.a, t.b_prime)


def test_closed_form_constellation_single_point():
    cf = closed_form_constellation(single_point_graph())
    assert (cf.a, cf.b_prime) == (1, 0)


def test_closed_form_constellation_hypotheses(fix_a):
    with pytest.raises(HypothesesNotMetError):
        closed_form_constellation(fix_a)


@pytest.mark.parametrize("seed", range(30))
def test_closed_form_free_points_matches_general(seed):
    g = random_graph(
        random.Random(seed),
        max_points=10,
        max_constellations=4,
        satellites=False,
        section_flags=False,
        deep_fiber_flags=False,
    )
    cf = closed_form_free_points(g)
    t = compute_thresholds(g)
    assert (cf.a, cf.b_prime) == (t.a, t.b_prime)


@pytest.mark.parametrize("seed", range(30))
def test_closed_form_constellation_matches_general(seed):
    g = random_graph(random.Random(seed), max_points=10, max_constellations=1)
    cf = closed_form_constellation(g)
    t = compute_thresholds(g)
    assert (cf.a, cf.b_prime) == (t.a, t.b_prime)


@pytest.mark.parametrize("seed", range(20))
def test_threshold_witness_semantics(seed):
    s = derive_chains(random_graph(random.Random(seed)))
    gens = generator_set(s)
    t = compute_thresholds(s, gens)
    others = [e.divisor for e in gens.entries if e.divisor != f_star()]
    assert all(self_intersection(d).evaluate(t.a) >= 0 for d in others)
    assert all(anticanonical_product(d).evaluate(max(t.b_prime, 0)) >= 1 for d in others)
    if t.a >= 2:
        assert any(self_intersection(d).evaluate(t.a - 1) < 0 for d in others)
    if t.b_prime >= 1:
        assert any(anticanonical_product(d).evaluate(t.b_prime - 1) <= 0 for d in others)


def test_a_of_pg_small_forests():
    assert a_of_pg(single_point_graph()) == 1
    chain2 = make_graph(
        [PointNode(id="p1"), PointNode(id="p2", parent="p1", proximate_to=("p1",))],
        {"p1": "f1"},
    )
    assert a_of_pg(chain2) == 2


def test_a_of_pg_eight_isolated_points(fix_e):
    assert a_of_pg(fix_e) == 8


def test_a_of_pg_ignores_existing_arrows(fix_b):
    # the bound depends only on the proximity forest, not the arrows
    stripped = make_graph(
        [
            PointNode(id=p.id, parent=p.parent, proximate_to=p.proximate_to)
            for p in fix_b.points
        ],
        fix_b.fiber_of_origin,
    )
    assert a_of_pg(fix_b) == a_of_pg(stripped)


@pytest.mark.parametrize("seed", range(8))
def test_a_of_pg_dominates_every_placement(seed):
    g = random_graph(random.Random(seed), max_points=6)
    assert a_of_pg(g) >= a_of_apg(g)


def test_report_verdicts(fix_a, fix_b, fix_e):
    v = report(fix_b, 2)
    assert (v.ne_minimal, v.mori_dream) == ("yes", "criterion-silent")
    v = report(fix_b, 3)
    assert (v.ne_minimal, v.mori_dream) == ("yes", "yes")
    v = report(fix_a, 2)
    assert (v.ne_minimal, v.mori_dream) == ("yes", "yes")
    v = report(fix_e, 7)
    assert (v.ne_minimal, v.mori_dream) == ("criterion-silent", "criterion-silent")
    v = report(fix_e, 8)
    assert (v.ne_minimal, v.mori_dream) == ("yes", "yes")


def test_report_p2_mode(fix_d):
    v = report(fix_d, 1, p2_mode=True)
    assert (v.ne_minimal, v.mori_dream) == ("yes", "yes")
    with pytest.raises(ValueError):
        report(fix_d, 2, p2_mode=True)
    with pytest.raises(ValueError):
        report(fix_d, -1)
